"""Block ILU(k) preconditioning for sparse linear systems.

The package factors a sparse matrix into block triangular parts with a
controlled amount of fill, splits off the block diagonal so both triangular
sweeps have unit diagonals, and applies the result inside restarted GMRES
with level-scheduled parallel substitution.
"""

from .errors import (
    FactorizationError,
    MatrixMarketError,
    SingularBlockError,
    StructuralError,
)
from .factor import (
    BlockIlukFactors,
    block_ilu0_factorize,
    block_invert,
    build_preconditioner,
    materialize,
    point_ilu0_factorize,
    split_ldu,
)
from .gmres import SolverConfig, SolveStats, gmres
from .mmio import read_matrix_market
from .poisson import gen_poisson_3d
from .sparse import (
    BcsrMatrix,
    CsrMatrix,
    PatternMatrix,
    assemble_csr,
    bcsr_from_csr,
    csr_expand,
    csr_from_triplets,
    extract_point_pattern,
    spmv,
)
from .symbolic import coupled_iluk_oracle, symbolic_phase
from .trisolve import (
    LevelSchedule,
    TriangularOperand,
    apply_block_diagonal,
    apply_preconditioner,
    build_level_schedule,
    solve_unit_triangular,
    strict_triangle,
)

__version__ = "0.1.0"

__all__ = [
    "BcsrMatrix",
    "BlockIlukFactors",
    "CsrMatrix",
    "FactorizationError",
    "LevelSchedule",
    "MatrixMarketError",
    "PatternMatrix",
    "SingularBlockError",
    "SolveStats",
    "SolverConfig",
    "StructuralError",
    "TriangularOperand",
    "apply_block_diagonal",
    "apply_preconditioner",
    "assemble_csr",
    "bcsr_from_csr",
    "block_ilu0_factorize",
    "block_invert",
    "build_level_schedule",
    "build_preconditioner",
    "coupled_iluk_oracle",
    "csr_expand",
    "csr_from_triplets",
    "extract_point_pattern",
    "gen_poisson_3d",
    "gmres",
    "point_ilu0_factorize",
    "read_matrix_market",
    "solve_unit_triangular",
    "split_ldu",
    "spmv",
    "strict_triangle",
    "symbolic_phase",
    "__version__",
]
