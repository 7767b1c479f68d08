from cemstokes.apps.core.exceptions import CemError


class EmptyRegion(CemError):
    default_detail = 'the oversampling region has no free velocity DOFs.'
    default_code = 'empty_region'
