from cemstokes.apps.core.exceptions import CemError


class RankDeficientBasis(CemError):
    default_detail = 'the coarse stiffness matrix is numerically singular.'
    default_code = 'rank_deficient_basis'


class SingularPressureSystem(CemError):
    default_detail = 'the pressure recovery system is singular.'
    default_code = 'singular_pressure_system'
