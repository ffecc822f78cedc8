import pytest

from tmkit.diagnostics import Code, PathError
from tmkit.models import Action, Injection, Scenario, StageRef
from tmkit.settings import settings
from tmkit.sim import (
    Firing, FiringKind, RecordKind, SimState, Token, enabled_firings, quiescent, simulate, step, trace_diagnostics,
)

from .conftest import load_corpus_model, model_of

CUSTOMER_TRACE = '''\
0	create	1	Customer.transfer
0	trigger	1	Customer.transfer ~> Customer.Address.create
1	move	1	Customer.transfer -> Customer.receive
1	create	2	Customer.Address.create
2	move	1	Customer.receive -> Customer.process
2	process	1	Customer.process
2	move	2	Customer.Address.create -> Customer.Address.release
3	move	1	Customer.process -> Customer.release
3	move	2	Customer.Address.release -> Customer.Address.transfer
4	move	1	Customer.release -> Customer.Updater.transfer
4	move	2	Customer.Address.transfer -> Customer.Updater.transfer
5	move	1	Customer.Updater.transfer -> Customer.Updater.receive
5	move	2	Customer.Updater.transfer -> Customer.Updater.receive
6	move	1	Customer.Updater.receive -> Customer.Updater.process
6	process	1	Customer.Updater.process
6	move	2	Customer.Updater.receive -> Customer.Updater.process
6	process	2	Customer.Updater.process
6	trigger	1	Customer.Updater.process ~> Customer.Address.process
6	trigger	2	Customer.Updater.process ~> Customer.Address.process
7	process	-	Customer.Address.process
'''

FAN_OUT = '''
thimac A { stage transfer }
thimac B { stage transfer }
thimac C { stage transfer }
flow A.transfer -> B.transfer
flow A.transfer -> C.transfer
scenario s { inject "x" at A.transfer step 0 }
'''


def _records(trace, kind=None, subject=None) -> list[tuple]:
    return [
        (x.step, x.kind, x.token, str(x.subject))
        for x in trace.records
        if (kind is None or x.kind is kind) and (subject is None or str(x.subject) == subject)
    ]


class TestStep:
    def test_quiescent(self, chair):
        state = SimState()
        assert enabled_firings(chair, state) == []
        assert step(chair, state) == (state, [])

    def test_move_descriptor(self, chair):
        stage = StageRef(('Chair', 'Seat'), Action.RELEASE)
        state = SimState(tokens=(Token(1, 'seat', stage),), next_id=2)
        assert enabled_firings(chair, state) == [Firing(FiringKind.MOVE, 1, chair.flows_from(stage)[0])]

    def test_boundary_move_not_enabled(self, chair_object_bad):
        stage = StageRef(('Chair', 'Seat'), Action.TRANSFER)
        state = SimState(tokens=(Token(1, 'seat', stage),), next_id=2)
        assert enabled_firings(chair_object_bad, state) == []
        assert not quiescent(chair_object_bad, state)
        state, records = step(chair_object_bad, state)
        assert [x.kind for x in records] == [RecordKind.BREACH]
        assert quiescent(chair_object_bad, state)

    def test_inject_descriptor(self, chair):
        injection = Injection('seat', StageRef(('Chair', 'Seat'), Action.CREATE), 1)
        assert enabled_firings(chair, SimState(scheduled=(injection,))) == []
        assert enabled_firings(chair, SimState(step=1, scheduled=(injection,))) == [
            Firing(FiringKind.INJECT, None, injection)
        ]

    def test_activation_descriptor(self, customer):
        state, _ = step(customer, SimState(scheduled=customer.scenario('change_address').injections))
        assert Firing(FiringKind.ACTIVATE, None, StageRef(('Customer', 'Address'), Action.CREATE)) in \
            enabled_firings(customer, state)

    def test_scheduled_keeps_running(self, chair):
        injection = Injection('seat', StageRef(('Chair', 'Seat'), Action.CREATE), 2)
        state, records = step(chair, SimState(scheduled=(injection,)))
        assert records == [] and state.step == 1 and state.scheduled == (injection,)


class TestSimulate:
    def test_customer_trace(self, customer):
        trace = simulate(customer, 'change_address')
        assert str(trace) == CUSTOMER_TRACE
        assert not trace.step_limited
        assert trace.final_state.step == 8

    def test_fresh_label(self, customer):
        trace = simulate(customer, 'change_address')
        [record] = [x for x in trace.records if x.kind is RecordKind.CREATE and x.token == 2]
        assert record.payload == 'Customer.Address#2'

    def test_fresh_label_format(self, customer):
        settings.init({'fresh_label_format': 'new {thimac}'})
        trace = simulate(customer, 'change_address')
        assert trace.records[3].payload == 'new Customer.Address'

    def test_processed_tokens(self, customer):
        tokens = simulate(customer, 'change_address').final_state.tokens
        assert [(x.id, str(x.location), x.processed) for x in tokens] == [
            (1, 'Customer.Updater.process', True),
            (2, 'Customer.Updater.process', True),
        ]

    def test_withdrawal(self, withdrawal):
        trace = simulate(withdrawal, 'withdraw')
        assert _records(trace, RecordKind.TRIGGER, 'Customer.receive ~> Customer.Request.create') == [
            (3, RecordKind.TRIGGER, 1, 'Customer.receive ~> Customer.Request.create'),
            (3, RecordKind.TRIGGER, 2, 'Customer.receive ~> Customer.Request.create'),
        ]
        assert _records(trace, RecordKind.MOVE, 'Customer.Request.transfer -> Account.transfer') == [
            (7, RecordKind.MOVE, 3, 'Customer.Request.transfer -> Account.transfer'),
        ]
        assert _records(trace, RecordKind.MOVE, 'Account.release -> Account.Identity.transfer') == [
            (11, RecordKind.MOVE, 3, 'Account.release -> Account.Identity.transfer'),
        ]
        assert _records(trace, RecordKind.MOVE, 'Account.release -> Account.Amount.transfer') == [
            (11, RecordKind.MOVE, 4, 'Account.release -> Account.Amount.transfer'),
        ]
        assert _records(trace, RecordKind.PROCESS, 'Account.Limit.process') == [
            (14, RecordKind.PROCESS, None, 'Account.Limit.process'),
        ]
        creates = [(x.step, x.token, str(x.subject), x.payload) for x in trace.records if x.kind is RecordKind.CREATE]
        assert creates == [
            (0, 1, 'Customer.Identity.create', 'identity'),
            (1, 2, 'Person.transfer', 'amount'),
            (4, 3, 'Customer.Request.create', ('identity', 'amount')),
            (14, 5, 'Account.Balance.create', ('identity', 'amount')),
            (16, 6, 'Account.NewBalance.create', ('identity', 'amount', 'identity', 'amount')),
            (17, 7, 'Atm.create', 'Atm#7'),
        ]
        assert trace.records[-1].step == 19
        assert trace.final_state.step == 20

    def test_replica_origin(self, withdrawal):
        tokens = {x.id: x for x in simulate(withdrawal, 'withdraw').final_state.tokens}
        assert tokens[4].origin == 3
        assert tokens[4].payload == ('identity', 'amount')
        assert tokens[3].origin is None

    def test_reification(self, playing):
        trace = simulate(playing, 'usa_tennis')
        assert len(_records(trace, RecordKind.TRIGGER)) == 3
        assert len(_records(trace, RecordKind.PROCESS, 'Playing.CountrySport.process')) == 3
        [create] = [x for x in trace.records if str(x.subject) == 'Playing.CountrySport.create']
        assert (create.step, create.token, create.payload) == (5, 4, ('USA', 'tennis', '1st'))

    def test_repeated_creation(self, order):
        trace = simulate(order, 'three_items')
        assert [x[0] for x in _records(trace, RecordKind.CREATE, 'Order.OrderItem.create')] == [4, 5, 6]

    def test_fan_out(self):
        trace = simulate(model_of(FAN_OUT), 's')
        assert _records(trace, RecordKind.MOVE) == [
            (1, RecordKind.MOVE, 1, 'A.transfer -> B.transfer'),
            (1, RecordKind.MOVE, 2, 'A.transfer -> C.transfer'),
        ]
        assert [(x.id, str(x.location), x.origin) for x in trace.final_state.tokens] == [
            (1, 'B.transfer', None),
            (2, 'C.transfer', 1),
        ]

    def test_boundary_breach(self, chair_object_bad):
        scenario = Scenario('s', (Injection('seat', StageRef(('Chair', 'Seat'), Action.CREATE), 0),))
        trace = simulate(chair_object_bad, scenario)
        assert _records(trace)[-1] == (3, RecordKind.BREACH, 1, 'Chair.Seat.transfer -> Room.transfer')
        [token] = trace.final_state.tokens
        assert token.halted and str(token.location) == 'Chair.Seat.transfer'
        assert not trace.step_limited
        [diagnostic] = trace_diagnostics(trace)
        assert (diagnostic.code, diagnostic.subject, diagnostic.is_error) == (
            Code.BOUNDARY_BREACH, 'Chair.Seat.transfer -> Room.transfer', False,
        )

    def test_objectified_chair_arrives(self):
        trace = simulate(load_corpus_model('chair-object.tm'), 'carry')
        assert [x[0] for x in _records(trace, RecordKind.MOVE, 'Chair.transfer -> Room.transfer')] == [3, 3]

    def test_parts_arrive(self, chair):
        trace = simulate(chair, 'move')
        assert [x[0] for x in _records(trace, RecordKind.MOVE) if x[3].endswith('-> Room.receive')] == [4, 4]

    def test_deterministic(self, withdrawal):
        first, second = simulate(withdrawal, 'withdraw'), simulate(withdrawal, 'withdraw')
        assert first == second
        assert str(first) == str(second)

    def test_step_limit(self, withdrawal):
        trace = simulate(withdrawal, 'withdraw', max_steps=5)
        assert trace.step_limited
        assert (trace.records[-1].step, trace.records[-1].kind) == (5, RecordKind.STEP_LIMIT)
        assert str(trace.records[-1]) == '5\tstep-limit\t-\t-'
        assert [(x.code, x.subject) for x in trace_diagnostics(trace)] == [(Code.STEP_LIMIT, 'withdraw')]

    def test_configured_step_limit(self, withdrawal):
        settings.init({'max_steps': '3'})
        assert simulate(withdrawal, 'withdraw').step_limited

    def test_empty_scenario(self, chair):
        trace = simulate(chair, Scenario('nothing', ()))
        assert trace.records == () and trace.final_state.step == 0

    def test_unknown_scenario(self, chair):
        with pytest.raises(PathError):
            simulate(chair, 'fly')

    def test_unresolved_injection(self, chair):
        scenario = Scenario('s', (Injection('wing', StageRef(('Chair', 'Wing'), Action.CREATE), 0),))
        with pytest.raises(PathError):
            simulate(chair, scenario)

    def test_invalid_bound(self, chair):
        with pytest.raises(ValueError):
            simulate(chair, 'move', max_steps=0)

    def test_moves_follow_locations(self, withdrawal):
        trace = simulate(withdrawal, 'withdraw')
        where: dict[int, StageRef] = {}
        for record in trace.records:
            if record.kind is RecordKind.CREATE:
                where[record.token] = record.subject
            elif record.kind is RecordKind.MOVE:
                if record.token in where:
                    assert where[record.token] == record.subject.src
                where[record.token] = record.subject.dst
