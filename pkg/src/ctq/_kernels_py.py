"""Pure numpy/math twin of the compiled kernels; same interface and arithmetic."""
import math

import numpy as np

BACKEND = "python"


class Evaluator:
    def __init__(self, a0, a1, a2, a3, a4, mu):
        self.a0 = a0
        self.a1c = a1 * math.cos(mu)
        self.a1s = a1 * math.sin(mu)
        self.a2sq = a2 * a2
        self.a34sq = a3 * a3 + a4 * a4
        self.a3 = a3
        self.a4 = a4
        self.a2a4 = a2 * a4
        self.a2a3 = a2 * a3

    def _branch(self, k, g, cph, sph):
        """sqrt(P) from H = M M^dagger and the success weight 4|det M|^2 / (p + sqrt(P))."""
        mre = self.a0 * k * cph + self.a1c * g
        mim = self.a0 * k * sph + self.a1s * g
        gg = g * g
        h00 = mre * mre + mim * mim + self.a2sq * gg
        h11 = self.a34sq * gg
        hre = self.a3 * g * mre + self.a2a4 * gg
        him = self.a3 * g * mim
        d = h00 - h11
        p = h00 + h11
        r = np.minimum(np.sqrt(d * d + 4.0 * (hre * hre + him * him)), p)
        dre = mre * self.a4 * g - self.a2a3 * gg
        dim = mim * self.a4 * g
        den = p + r
        num = 4.0 * (dre * dre + dim * dim)
        w = np.divide(num, den, out=np.zeros_like(den, dtype=float), where=den > 0)
        return r, w

    def _eval(self, ch, sh, cph, sph):
        r1, w1 = self._branch(ch, sh, cph, sph)
        r2, w2 = self._branch(-sh, ch, cph, sph)
        return np.clip(r1 + r2, 0.0, 1.0), np.clip(w1 + w2, 0.0, 1.0)

    def _point(self, theta, phi):
        return self._eval(math.cos(0.5 * theta), math.sin(0.5 * theta), math.cos(phi), math.sin(phi))

    def success(self, theta, phi):
        return float(self._point(theta, phi)[1])

    def objective(self, theta, phi):
        return float(self._point(theta, phi)[0])

    def fill_grid(self, thetas, phis, out_f, out_s, row_start, row_stop):
        th = 0.5 * np.asarray(thetas[row_start:row_stop])[:, None]
        phis = np.asarray(phis)[None, :]
        f, s = self._eval(np.cos(th), np.sin(th), np.cos(phis), np.sin(phis))
        out_f[row_start:row_stop] = f
        out_s[row_start:row_stop] = s


def local_maxima(succ: np.ndarray) -> np.ndarray:
    """Mask of cells no smaller than any of their eight neighbours.

    The last phi column duplicates the first and is dropped; phi wraps around
    and cells past theta = 0 or pi count as absent.
    """
    core = succ[:, :-1]
    nt, npf = core.shape
    padded = np.full((nt + 2, npf + 2), -np.inf)
    padded[1:-1, 1:-1] = core
    padded[1:-1, 0] = core[:, -1]
    padded[1:-1, -1] = core[:, 0]
    is_max = np.ones(core.shape, dtype=bool)
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            if di != 1 or dj != 1:
                is_max &= core >= padded[di : di + nt, dj : dj + npf]
    return is_max
