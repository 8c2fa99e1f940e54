"""K-theory and structural summary of the C*-algebra of a domino 2-graph.

Everything here is closed form.  Facts that are computed from (n, q, t)
are kept apart from facts that are quoted as known results; the latter are
listed in ``StructureReport.asserted``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .domino import BasicData, is_product_graph, sigma_order

PRODUCT_TORUS = "PRODUCT_TORUS"
PRODUCT_O2 = "PRODUCT_O2"
CROSSED = "CROSSED"

TORUS_2 = "TORUS_2"
POINT_LIKE = "POINT_LIKE"
CIRCLE = "CIRCLE"

ASSERTED = "asserted"
COMPUTED = "computed"


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    """Finitely generated abelian group Z^free_rank + sum of Z/k."""
    free_rank: int = 0
    torsion_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be >= 0")
        object.__setattr__(self, "torsion_orders", tuple(self.torsion_orders))
        for k in self.torsion_orders:
            if k < 2:
                raise ValueError(f"torsion orders must be >= 2, got {k}")

    @classmethod
    def cyclic(cls, order: int) -> "AbelianGroupDescriptor":
        """Z/order, with Z/1 the trivial group."""
        if order < 1:
            raise ValueError("cyclic order must be >= 1")
        return cls(0, () if order == 1 else (order,))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion_orders

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{k}" for k in self.torsion_orders]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion_orders": list(self.torsion_orders),
                "text": str(self)}


def structure_case(data: BasicData) -> str:
    if data.n == 1:
        return PRODUCT_TORUS
    if (data.n, data.q, data.t) == (2, 2, 0):
        return PRODUCT_O2
    return CROSSED


def k_theory(data: BasicData) -> Tuple[AbelianGroupDescriptor, AbelianGroupDescriptor]:
    """(K0, K1): Z^2 when n = 1, trivial for (2,2,0), else Z/(q^(n-1) - 1).

    The two groups always agree.
    """
    case = structure_case(data)
    if case == PRODUCT_TORUS:
        g = AbelianGroupDescriptor(2)
    elif case == PRODUCT_O2:
        g = AbelianGroupDescriptor()
    else:
        # (2,2,1) gives Z/1, the trivial group
        g = AbelianGroupDescriptor.cyclic(data.q ** (data.n - 1) - 1)
    return g, g


@dataclass
class StructureReport:
    data: BasicData
    case: str
    k0: AbelianGroupDescriptor
    k1: AbelianGroupDescriptor
    cuntz_generator_count: int
    sigma_order: int
    product_factors: str = ""
    primitive_ideal_space: str = ""
    simplicity_of_finite_crossed_product: bool = False
    asserted: List[str] = field(default_factory=list)

    def provenance(self) -> Dict[str, str]:
        keys = ["case", "k0", "k1", "cuntz_generator_count", "sigma_order",
                "product_factors", "primitive_ideal_space",
                "simplicity_of_finite_crossed_product"]
        return {k: ASSERTED if k in self.asserted else COMPUTED for k in keys}

    def to_dict(self) -> dict:
        return {
            "n": self.data.n, "q": self.data.q, "t": self.data.t,
            "case": self.case,
            "k0": self.k0.to_dict(),
            "k1": self.k1.to_dict(),
            "cuntz_generator_count": self.cuntz_generator_count,
            "sigma_order": self.sigma_order,
            "product_factors": self.product_factors,
            "primitive_ideal_space": self.primitive_ideal_space,
            "simplicity_of_finite_crossed_product": self.simplicity_of_finite_crossed_product,
            "provenance": self.provenance(),
        }

    def to_text(self) -> str:
        d = self.data
        prov = self.provenance()
        lines = [
            f"data: n={d.n} q={d.q} t={d.t}",
            f"case: {self.case}",
            f"K0: {self.k0}",
            f"K1: {self.k1}",
            f"vertices (Cuntz generators): {self.cuntz_generator_count}",
            f"sigma order: {self.sigma_order}",
        ]
        if self.product_factors:
            lines.append(f"product of 1-graphs: {self.product_factors}")
        lines.append(f"primitive ideal space: {self.primitive_ideal_space} "
                     f"[{prov['primitive_ideal_space']}]")
        lines.append("finite crossed product simple: "
                     f"{'yes' if self.simplicity_of_finite_crossed_product else 'no'} "
                     f"[{prov['simplicity_of_finite_crossed_product']}]")
        return "\n".join(lines) + "\n"


def structure_report(data: BasicData) -> StructureReport:
    case = structure_case(data)
    k0, k1 = k_theory(data)
    product, factors = is_product_graph(data)
    if product != (case != CROSSED):
        raise AssertionError(f"case {case} disagrees with the product test for {data}")
    if case == PRODUCT_TORUS:
        prim, simple = TORUS_2, False
    elif case == PRODUCT_O2:
        # C(T) tensor a simple algebra: primitive ideals are points of T
        prim, simple = CIRCLE, False
    else:
        prim, simple = CIRCLE, True
    return StructureReport(
        data=data, case=case, k0=k0, k1=k1,
        cuntz_generator_count=data.q ** (data.n - 1),
        sigma_order=sigma_order(data),
        product_factors=factors or "",
        primitive_ideal_space=prim,
        simplicity_of_finite_crossed_product=simple,
        asserted=["primitive_ideal_space", "simplicity_of_finite_crossed_product"],
    )
