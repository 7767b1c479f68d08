from cemstokes.apps.core.exceptions import CemError


class NotSPD(CemError):
    default_detail = 'the matrix is not symmetric positive definite.'
    default_code = 'not_spd'


class SingularSystem(CemError):
    default_detail = 'the saddle point system is singular.'
    default_code = 'singular_system'


class DegeneratePencil(CemError):
    default_detail = 'the mass matrix of the eigenproblem is singular on the requested subspace.'
    default_code = 'degenerate_pencil'
