import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


class ConvergenceError(RuntimeError):
    """Bounded search hit its iteration cap before reaching tolerance."""


def golden_minimize(f, a, b, tol=1e-10, max_iter=200):
    """Minimize a unimodal f on [a, b] by golden-section search.

    Returns (x, f(x)) for the best point seen. Raises ConvergenceError when the
    bracket is still wider than tol after max_iter iterations.
    """
    a, b = min(a, b), max(a, b)
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"golden section: bracket [{a!r}, {b!r}] wider than {tol} after {max_iter} iterations")
        if fc <= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    return (c, fc) if fc <= fd else (d, fd)
