"""Seeded synthetic point and catalog generators."""

from dataclasses import dataclass, field

import numpy as np

KINDS = {
    "uniform_square": (),
    "gaussian_cluster": (("k", int, 8), ("sigma", float, 0.05)),
    "grid_jitter": (("eps", float, 0.1),),
    "adversarial_geometric": (("r", float, 0.5),),
}


@dataclass(frozen=True)
class Distribution:
    kind: str = "uniform_square"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(
                f"unknown distribution {self.kind!r}; choose from {', '.join(KINDS)}")
        spec = KINDS[self.kind]
        full = {name: default for name, _, default in spec}
        unknown = set(self.params) - set(full)
        if unknown:
            raise ValueError(f"{self.kind} takes no parameter {sorted(unknown)}")
        full.update(self.params)
        object.__setattr__(self, "params", full)
        if self.kind == "gaussian_cluster" and (full["k"] < 1 or full["sigma"] <= 0):
            raise ValueError("gaussian_cluster needs k >= 1 and sigma > 0")
        if self.kind == "grid_jitter" and not 0 <= full["eps"] <= 1:
            raise ValueError("grid_jitter needs 0 <= eps <= 1")
        if self.kind == "adversarial_geometric" and not 0 < full["r"] < 1:
            raise ValueError("adversarial_geometric needs 0 < r < 1")

    @classmethod
    def parse(cls, text):
        """Parse ``KIND`` or ``KIND:v1,v2`` (positional, in declared order)."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        if kind not in KINDS:
            raise ValueError(
                f"unknown distribution {kind!r}; choose from {', '.join(KINDS)}")
        spec = KINDS[kind]
        params = {}
        if rest.strip():
            values = [v.strip() for v in rest.split(",")]
            if len(values) > len(spec):
                raise ValueError(f"{kind} takes at most {len(spec)} parameters")
            for (name, conv, _), v in zip(spec, values):
                if "=" in v:
                    name, v = (s.strip() for s in v.split("=", 1))
                    conv = dict((n, c) for n, c, _ in spec).get(name, float)
                params[name] = conv(v)
        return cls(kind, params)

    def label(self):
        if not KINDS[self.kind]:
            return self.kind
        args = ",".join(f"{self.params[n]:g}" for n, _, _ in KINDS[self.kind])
        return f"{self.kind}:{args}"

    def points(self, n, rng):
        """``n`` planar points as an ``(n, 2)`` float array."""
        p = self.params
        if self.kind == "uniform_square":
            return rng.random((n, 2))
        if self.kind == "gaussian_cluster":
            centers = rng.random((p["k"], 2))
            which = rng.integers(0, p["k"], size=n)
            return centers[which] + rng.normal(0.0, p["sigma"], size=(n, 2))
        if self.kind == "grid_jitter":
            side = max(1, int(np.ceil(np.sqrt(n))))
            cells = rng.permutation(side * side)[:n]
            base = np.stack([cells % side, cells // side], axis=1).astype(float)
            jitter = (rng.random((n, 2)) - 0.5) * p["eps"]
            return (base + 0.5 + jitter) / side
        # x on a geometric ladder, y uniform
        x = self._ladder(n, rng)
        return np.stack([x, rng.random(n)], axis=1)

    def _ladder(self, n, rng):
        r = self.params["r"]
        j = np.arange(n) + rng.random(n)
        return np.power(r, j)

    def catalog(self, index, n, rng):
        """Sorted keys for catalog ``index`` of a path of catalogs.

        Every kind projects its points onto x, except ``adversarial_geometric``
        which alternates uniform catalogs with geometric ladders, so the wide
        gaps of one catalog sit on dense runs of its neighbor.
        """
        if self.kind == "adversarial_geometric":
            keys = self._ladder(n, rng) if index % 2 else rng.random(n)
        else:
            keys = self.points(n, rng)[:, 0]
        return np.sort(keys)


def trial_rng(seed, *path):
    """Independent generator for ``(seed, *path)``; schedule-independent."""
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))
