"""
Access to global application settings from the ini-file
"""

import inspect
import logging

log = logging.getLogger(__name__)

SETTINGS_SECTION = 'tmkit'

# defaults the paste deploy loader adds to every section
LOADER_KEYS = frozenset({'here', '__file__'})

DEFAULTS = {
    'default_profile': 'strict',
    'max_steps': '1000',
    'fresh_label_format': '{thimac}#{token}',
    'manifest_file': 'MANIFEST',
    'dot_rankdir': 'LR',
}


class Settings:
    """Global application settings from config file, falling back to built-in defaults"""
    def __init__(self):
        self._settings_dict: dict[str, str] = dict(DEFAULTS)

    def init(self, settings_dict: dict[str, str]):
        unknown = sorted(set(settings_dict) - set(DEFAULTS) - LOADER_KEYS)
        if unknown:
            log.warning(f'ignoring unknown settings: {", ".join(unknown)}')
        self._settings_dict = dict(DEFAULTS)
        self._settings_dict.update({k: v for k, v in settings_dict.items() if k in DEFAULTS})

    def reset(self):
        self._settings_dict = dict(DEFAULTS)

    def check(self):
        """
        Read every parameter once so misconfiguration shows up at startup
        @raise ValueError: first invalid or misconfigured parameter
        """
        for key in DEFAULTS:
            getattr(self, key)
        try:
            self.fresh_label_format.format(thimac='A', token=1)
        except (KeyError, IndexError, ValueError) as e:
            raise ValueError(f'invalid or misconfigured string parameter "fresh_label_format": {e!r}')

    def _get_int_param(self) -> int:
        param_key = inspect.currentframe().f_back.f_code.co_name  # the calling function name
        try:
            value = int(self._settings_dict[param_key])
            return value
        except Exception as e:
            raise ValueError(f'invalid or misconfigured integer parameter "{param_key}": {e}')

    def _get_str_param(self) -> str:
        param_key = inspect.currentframe().f_back.f_code.co_name  # the calling function name
        try:
            value = self._settings_dict[param_key]
            return value
        except Exception as e:
            raise ValueError(f'invalid or misconfigured string parameter "{param_key}": {e}')

    @property
    def default_profile(self) -> str:
        """Rule profile used by `check` when none is given: strict, lenient or a profile file"""
        return self._get_str_param()

    @property
    def max_steps(self) -> int:
        """Default bound on simulation rounds"""
        value = self._get_int_param()
        if value < 1:
            raise ValueError(f'invalid or misconfigured integer parameter "max_steps": {value} < 1')
        return value

    @property
    def fresh_label_format(self) -> str:
        """Label of a token created without same-round inflows; fields: thimac, token"""
        return self._get_str_param()

    @property
    def manifest_file(self) -> str:
        """Name of the corpus manifest inside a corpus directory"""
        return self._get_str_param()

    @property
    def dot_rankdir(self) -> str:
        """Graphviz rankdir of exported diagrams"""
        return self._get_str_param()


settings = Settings()
