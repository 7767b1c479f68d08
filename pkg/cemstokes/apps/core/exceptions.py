from rest_framework.exceptions import ValidationError


class CemError(Exception):
    """
    Base class of every error the solver raises on purpose.

    Subclasses set `default_detail` and `default_code` the way API exceptions
    do; `exit_code` is what the command line returns when the error escapes
    a command.
    """
    default_detail = 'the solver failed.'
    default_code = 'error'
    exit_code = 3

    def __init__(self, detail=None, **context):
        self.detail = detail if detail is not None else self.default_detail
        # numbers that help diagnose the failure (sizes, ranks, singular values)
        self.context = context
        super(CemError, self).__init__(self.detail)

    def as_dict(self):
        payload = {
            'code': self.default_code,
            'detail': str(self.detail),
        }
        payload.update(self.context)
        return payload


def core_exception_handler(exc):
    # Errors we know about are wrapped in an `errors` key so every failure the
    # command line reports has the same machine-readable shape. Anything else
    # is returned as None and left for the caller to re-raise.
    handlers = {
        'ValidationError': _handle_validation_error,
    }
    exception_class = exc.__class__.__name__

    if exception_class in handlers:
        return handlers[exception_class](exc)

    if isinstance(exc, CemError):
        return _handle_generic_error(exc)

    return None


def _handle_generic_error(exc):
    return {
        'errors': exc.as_dict()
    }


def _handle_validation_error(exc):
    return {
        'errors': {
            'code': 'invalid_config',
            'detail': exc.detail,
        }
    }


def exit_code_for(exc):
    """ returns the process exit status for an error handled above """
    if isinstance(exc, ValidationError):
        return 2
    return getattr(exc, 'exit_code', 1)
