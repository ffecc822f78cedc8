import pytest

from tmkit.dsl import parse
from tmkit.core import object_violations
from tmkit.params import CORPUS_DIR
from tmkit.tmkit import EXIT_ERRORS, EXIT_OK, EXIT_USAGE, main

from .test_sim import CUSTOMER_TRACE


def corpus_file(name: str) -> str:
    return str(CORPUS_DIR / name)


class TestArguments:
    def test_no_command(self, capsys):
        assert main([]) == EXIT_USAGE
        assert 'usage: tmkit' in capsys.readouterr().err

    def test_unknown_flag(self):
        assert main(['check', corpus_file('chair.tm'), '--colour']) == EXIT_USAGE

    def test_missing_file(self, capsys, tmp_path):
        assert main(['check', str(tmp_path / 'none.tm')]) == EXIT_USAGE
        assert 'cannot read' in capsys.readouterr().err

    def test_trace_export_needs_scenario(self):
        assert main(['export', corpus_file('customer.tm'), '--format', 'trace']) == EXIT_USAGE

    def test_bad_step_bound(self):
        assert main(['simulate', corpus_file('chair.tm'), '--scenario', 'move', '--max-steps', '0']) == EXIT_USAGE


class TestCheck:
    def test_strict(self, capsys):
        assert main(['check', corpus_file('chair.tm'), '--profile', 'strict']) == EXIT_OK
        assert capsys.readouterr().out.endswith('chair.tm\tstrict\tok\n')

    def test_encapsulation(self, capsys):
        assert main(['check', corpus_file('chair-object-bad.tm')]) == EXIT_ERRORS
        captured = capsys.readouterr()
        assert captured.err.count('error[encapsulation]') == 2
        assert captured.out.endswith('\tstrict\tfailed\n')

    def test_lenient(self):
        assert main(['check', corpus_file('withdrawal.tm')]) == EXIT_ERRORS
        assert main(['check', corpus_file('withdrawal.tm'), '--profile', 'lenient']) == EXIT_OK

    def test_profile_file(self, tmp_path):
        profile = tmp_path / 'withdrawal.profile'
        profile.write_text('base strict\nallow process -> receive cross\nallow process -> process cross\n')
        assert main(['check', corpus_file('withdrawal.tm'), '--profile', str(profile)]) == EXIT_OK

    def test_bad_profile_file(self, capsys, tmp_path):
        profile = tmp_path / 'bad.profile'
        profile.write_text('allow process -> teleport cross\n')
        assert main(['check', corpus_file('chair.tm'), '--profile', str(profile)]) == EXIT_USAGE
        assert 'error[syntax]' in capsys.readouterr().err

    def test_parse_errors(self, capsys, tmp_path):
        model = tmp_path / 'broken.tm'
        model.write_text('thimac B {}\nflow A.release -> B.create\n')
        assert main(['check', str(model)]) == EXIT_ERRORS
        err = capsys.readouterr().err
        assert 'broken.tm:2:' in err and 'error[unresolved]' in err


class TestRun:
    def test_simulate(self, capsys):
        assert main(['simulate', corpus_file('customer.tm'), '--scenario', 'change_address']) == EXIT_OK
        assert capsys.readouterr().out == CUSTOMER_TRACE

    def test_step_limit(self, capsys):
        args = ['simulate', corpus_file('withdrawal.tm'), '--scenario', 'withdraw', '--max-steps', '4']
        assert main(args) == EXIT_ERRORS
        captured = capsys.readouterr()
        assert captured.out.endswith('4\tstep-limit\t-\t-\n')
        assert 'warning[step-limit] withdraw' in captured.err

    def test_unknown_scenario(self, capsys):
        assert main(['simulate', corpus_file('chair.tm'), '--scenario', 'fly']) == EXIT_USAGE
        assert 'no scenario fly' in capsys.readouterr().err

    def test_events(self, capsys):
        assert main(['events', corpus_file('customer.tm'), '--scenario', 'change_address']) == EXIT_OK
        assert capsys.readouterr().out == 'E1\t2\nE2\t4\nE3\t4\nE4\t6\nE5\t7\n\nE1 -> E2 -> E3 -> E4 -> E5\n'

    def test_conform(self, capsys):
        args = ['conform', corpus_file('order.tm'), '--scenario', 'three_items', '--behavior', 'repeated']
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out == ''

    def test_conform_violated(self, capsys):
        args = ['conform', corpus_file('order.tm'), '--scenario', 'one_item', '--behavior', 'repeated']
        assert main(args) == EXIT_ERRORS
        assert capsys.readouterr().out == 'E2 -> E2\n'

    def test_conform_unknown_behavior(self):
        args = ['conform', corpus_file('order.tm'), '--scenario', 'one_item', '--behavior', 'missing']
        assert main(args) == EXIT_USAGE


class TestObjectify:
    def test_closure(self, capsys):
        assert main(['objectify', corpus_file('chair-object-bad.tm'), '--thimac', 'Chair']) == EXIT_OK
        result = parse(capsys.readouterr().out)
        assert result.ok
        assert object_violations(result.model, 'Chair') == []

    def test_unknown_thimac(self):
        assert main(['objectify', corpus_file('chair.tm'), '--thimac', 'Table']) == EXIT_USAGE


class TestExport:
    def test_dot(self, capsys):
        assert main(['export', corpus_file('chair.tm'), '--format', 'dot']) == EXIT_OK
        assert capsys.readouterr().out.startswith('digraph tm {\n')

    @pytest.mark.parametrize('fmt, first', [
        ('trace', '0\tcreate\t1\tCustomer.transfer'),
        ('trace-json', '{"step": 0, "kind": "create", "token": 1, "subject": "Customer.transfer"}'),
    ])
    def test_trace(self, capsys, fmt, first):
        args = ['export', corpus_file('customer.tm'), '--format', fmt, '--scenario', 'change_address']
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out.split('\n')[0] == first


class TestCorpus:
    def test_bundled(self, capsys):
        assert main(['corpus']) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 8
        assert all(x.endswith('\tok') for x in lines)
        assert 'withdrawal.tm\tlenient\tok' in lines

    def test_failing_entry(self, capsys, tmp_path):
        (tmp_path / 'chair.tm').write_text((CORPUS_DIR / 'chair-object-bad.tm').read_text())
        (tmp_path / 'MANIFEST').write_text('chair.tm\tstrict\n')
        assert main(['corpus', str(tmp_path)]) == EXIT_ERRORS
        assert capsys.readouterr().out == 'chair.tm\tstrict\tfailed\n'

    def test_bad_manifest(self, tmp_path):
        (tmp_path / 'MANIFEST').write_text('chair.tm\tmedium\n')
        assert main(['corpus', str(tmp_path)]) == EXIT_USAGE


class TestConfig:
    def test_settings_from_file(self, capsys, tmp_path):
        config = tmp_path / 'tmkit.ini'
        config.write_text('[tmkit]\nmax_steps = 3\ndefault_profile = lenient\n')
        args = ['--config', str(config), 'simulate', corpus_file('withdrawal.tm'), '--scenario', 'withdraw']
        assert main(args) == EXIT_ERRORS
        assert capsys.readouterr().out.endswith('3\tstep-limit\t-\t-\n')
        assert main(['--config', str(config), 'check', corpus_file('withdrawal.tm')]) == EXIT_OK

    def test_missing_config(self, capsys, tmp_path):
        assert main(['--config', str(tmp_path / 'missing.ini'), 'check', corpus_file('chair.tm')]) == EXIT_USAGE
        assert 'cannot load config' in capsys.readouterr().err

    @pytest.mark.parametrize('line', ['max_steps = lots', 'max_steps = 0', 'fresh_label_format = {owner}'])
    def test_misconfigured_settings(self, capsys, tmp_path, line):
        config = tmp_path / 'tmkit.ini'
        config.write_text(f'[tmkit]\n{line}\n')
        assert main(['--config', str(config), 'check', corpus_file('chair.tm')]) == EXIT_USAGE
        assert 'invalid or misconfigured' in capsys.readouterr().err
