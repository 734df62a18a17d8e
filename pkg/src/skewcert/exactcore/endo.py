"""Substitution endomorphisms of k(x1, ..., xn).

A ``FieldEndo`` acts by ``f -> f(images)``, so on a point map ``p -> phi(p)``
it realizes ``f -> f o phi``.  Powers are memoized as generator images only.
"""

from __future__ import annotations

import threading
from typing import Mapping, Sequence

from .ratfunc import RatFunc


class EndoError(ValueError):
    pass


class FieldEndo:
    __slots__ = ("images", "inverse_images", "name", "_cache", "_inv_cache", "_lock", "__weakref__")

    def __init__(
        self,
        images: Sequence[RatFunc],
        inverse_images: Sequence[RatFunc] | None = None,
        name: str | None = None,
    ):
        images = tuple(images)
        if not images:
            raise EndoError("an endomorphism needs at least one generator")
        vars = images[0].vars
        if len(images) != len(vars) or any(img.vars != vars for img in images):
            raise EndoError("images must be given for every generator, over the same variables")
        if any(img.is_zero() for img in images):
            raise EndoError("generators must map to nonzero elements")
        self.images = images
        self.inverse_images = tuple(inverse_images) if inverse_images is not None else None
        if self.inverse_images is not None and len(self.inverse_images) != len(vars):
            raise EndoError("inverse needs one image per generator")
        self.name = name
        gens = tuple(RatFunc.var(vars, v) for v in vars)
        self._cache = [gens, images]
        self._inv_cache = [gens] + ([self.inverse_images] if self.inverse_images else [])
        self._lock = threading.Lock()

    # -- construction helpers ----------------------------------------------
    @classmethod
    def from_strings(
        cls,
        vars: Sequence[str],
        images: Sequence[str],
        inverse_images: Sequence[str] | None = None,
        name: str | None = None,
    ) -> "FieldEndo":
        vars = tuple(vars)
        imgs = [RatFunc.parse(s, vars) for s in images]
        inv = [RatFunc.parse(s, vars) for s in inverse_images] if inverse_images else None
        return cls(imgs, inv, name=name)

    @classmethod
    def from_spec(cls, spec: Mapping) -> "FieldEndo":
        """Build from ``{"vars": [...], "images": [...], "inverse_images": [...]?}``."""
        return cls.from_strings(
            spec["vars"], spec["images"], spec.get("inverse_images"), name=spec.get("name")
        )

    @classmethod
    def identity(cls, vars: Sequence[str]) -> "FieldEndo":
        vars = tuple(vars)
        gens = [RatFunc.var(vars, v) for v in vars]
        return cls(gens, gens, name="id")

    def to_spec(self) -> dict:
        spec = {"vars": list(self.vars), "images": [str(f) for f in self.images]}
        if self.inverse_images is not None:
            spec["inverse_images"] = [str(f) for f in self.inverse_images]
        if self.name:
            spec["name"] = self.name
        return spec

    @property
    def vars(self) -> tuple:
        return self.images[0].vars

    @property
    def invertible(self) -> bool:
        return self.inverse_images is not None

    def __repr__(self) -> str:
        imgs = ", ".join(f"{v}->{f}" for v, f in zip(self.vars, self.images))
        return f"FieldEndo({imgs})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldEndo):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    # -- action ---------------------------------------------------------
    def apply(self, f: RatFunc) -> RatFunc:
        return self.apply_power(f, 1)

    def __call__(self, f: RatFunc) -> RatFunc:
        return self.apply(f)

    def apply_power(self, f: RatFunc, i: int) -> RatFunc:
        """``sigma^i(f)``; negative ``i`` needs the inverse."""
        if f.vars != self.vars:
            raise EndoError("element lives over different variables")
        if f.is_constant():
            return f
        imgs = self.iterate_images(i)
        if f.num.is_monomial() and f.den == 1:
            (e, c), = f.num.terms.items()
            if sum(e) == 1:
                return imgs[e.index(1)] * c
        try:
            return f.substitute(imgs)
        except ZeroDivisionError:
            raise EndoError("endomorphism undefined on this element") from None

    def iterate_images(self, i: int) -> tuple:
        """Images of the generators under ``sigma^i`` (memoized)."""
        if i < 0:
            if self.inverse_images is None:
                raise EndoError("σ⁻¹ unavailable: no inverse supplied")
            return self._fill(self._inv_cache, self.inverse_images, -i)
        return self._fill(self._cache, self.images, i)

    def _fill(self, cache: list, step: tuple, i: int) -> tuple:
        if i < len(cache):
            return cache[i]
        with self._lock:
            while len(cache) <= i:
                prev = cache[-1]
                # sigma^(k+1)(g) = sigma(g) evaluated at sigma^k(generators)
                nxt = []
                for g in step:
                    try:
                        nxt.append(g.substitute(prev))
                    except ZeroDivisionError:
                        raise EndoError("endomorphism undefined on this element") from None
                cache.append(tuple(nxt))
            return cache[i]

    def cached_powers(self) -> int:
        return len(self._cache) - 1

    def power(self, i: int) -> "FieldEndo":
        """``sigma^i`` as a new endomorphism."""
        if i == 0:
            return FieldEndo.identity(self.vars)
        imgs = self.iterate_images(i)
        inv = None
        if self.inverse_images is not None:
            inv = self.iterate_images(-i)
        return FieldEndo(imgs, inv, name=f"{self.name or 'σ'}^{i}")

    def inverse(self) -> "FieldEndo":
        if self.inverse_images is None:
            raise EndoError("σ⁻¹ unavailable: no inverse supplied")
        return FieldEndo(self.inverse_images, self.images,
                         name=f"{self.name or 'σ'}^-1")

    def compose(self, inner: "FieldEndo") -> "FieldEndo":
        """The endomorphism ``f -> self(inner(f))``."""
        if inner.vars != self.vars:
            raise EndoError("cannot compose endomorphisms over different variables")
        imgs = [self.apply(g) for g in inner.images]
        inv = None
        if self.inverse_images is not None and inner.inverse_images is not None:
            # (self o inner)^-1 = inner^-1 o self^-1
            inv_inner = inner.inverse()
            inv = [inv_inner.apply(g) for g in self.inverse_images]
        return FieldEndo(imgs, inv)

    def is_identity(self) -> bool:
        return all(img == RatFunc.var(self.vars, v) for img, v in zip(self.images, self.vars))

    def verify_inverse(self) -> bool:
        """Check both compositions with the supplied inverse are the identity."""
        if self.inverse_images is None:
            return False
        inv = FieldEndo(self.inverse_images)
        return self.compose(inv).is_identity() and inv.compose(self).is_identity()

    # -- pointwise action ---------------------------------------------------
    def point_orbit(self, point: Sequence, steps: int) -> list:
        """Points ``q_k`` with ``sigma^k(f)(p) = f(q_k)`` for ``k = 0..steps``.

        Raises ``ZeroDivisionError`` if an image is undefined along the way.
        """
        pts = [tuple(point)]
        for _ in range(steps):
            q = pts[-1]
            pts.append(tuple(img.evaluate(q) for img in self.images))
        return pts

    def point_orbit_mod(self, point: Sequence[int], steps: int, p: int) -> list:
        pts = [tuple(v % p for v in point)]
        for _ in range(steps):
            q = pts[-1]
            pts.append(tuple(img.evaluate_mod(q, p) for img in self.images))
        return pts


def apply_endo(sigma: FieldEndo, f: RatFunc) -> RatFunc:
    return sigma.apply(f)


def endo_power(sigma: FieldEndo, i: int) -> FieldEndo:
    if i < 0:
        raise ValueError("power must be nonnegative")
    return sigma.power(i)
