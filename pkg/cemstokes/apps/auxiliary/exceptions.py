from cemstokes.apps.core.exceptions import CemError


class ZeroLambda(CemError):
    default_detail = 'the first excluded eigenvalue of a block is zero; increase ell.'
    default_code = 'zero_lambda'


class EmptyConstraintSpace(CemError):
    default_detail = 'the constrained pressure space of a block is smaller than ell.'
    default_code = 'empty_constraint_space'
