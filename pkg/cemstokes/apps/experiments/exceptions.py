from cemstokes.apps.core.exceptions import CemError


class ConfigError(CemError):
    default_detail = 'the experiment configuration is invalid.'
    default_code = 'invalid_config'
    exit_code = 2
