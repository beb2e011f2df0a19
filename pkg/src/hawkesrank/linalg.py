"""Small dense/sparse linear-algebra helpers shared by the model and centrality code."""
import numpy as np
import scipy.sparse.linalg as spla

# above this size linear systems are solved iteratively
DIRECT_SOLVE_MAX_DIM = 1000


def spectral_radius(A) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    if A.shape[0] > DIRECT_SOLVE_MAX_DIM:
        vals = spla.eigs(A, k=1, which="LM", return_eigenvectors=False)
        return float(np.abs(vals).max())
    return float(np.abs(np.linalg.eigvals(A)).max())


def solve_linear(A, b, tol=1e-12):
    """Solve ``A x = b``; LU for moderate sizes, GMRES above ``DIRECT_SOLVE_MAX_DIM``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[0] <= DIRECT_SOLVE_MAX_DIM:
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"singular linear system: {exc}") from exc
    else:
        x, info = spla.gmres(A, b, rtol=tol, atol=0.0, restart=200, maxiter=10_000)
        if info != 0:
            raise np.linalg.LinAlgError(f"GMRES did not converge (info={info})")
    if not np.all(np.isfinite(x)):
        raise np.linalg.LinAlgError("linear solve produced non-finite values")
    return x
