from cemstokes.apps.core.exceptions import CemError


class InvalidPerforation(CemError):
    default_detail = 'perforations must lie strictly inside the unit square.'
    default_code = 'invalid_perforation'
    exit_code = 2


class EmptyDomain(CemError):
    default_detail = 'every fine cell is perforated.'
    default_code = 'empty_domain'


class DisconnectedDomain(CemError):
    default_detail = 'the perforated domain splits into several components.'
    default_code = 'disconnected_domain'


class IncompatibleRefinement(CemError):
    default_detail = 'the fine grid does not refine the coarse grid.'
    default_code = 'incompatible_refinement'
    exit_code = 2


class DisconnectedBlock(CemError):
    default_detail = 'a perforation splits a coarse block into several parts.'
    default_code = 'disconnected_block'
