from ffql.algebra.family import (
    FamilySpec,
    Z,
    divisor_function,
    enumerate_family,
    family_size,
    mertens_sums,
    mobius,
    monic_polys,
    monic_polys_upto,
    prime_count,
    zeta_A,
)
from ffql.algebra.field import (
    ExtensionField,
    build_extension,
    check_q,
    eta,
    field_arith,
    is_prime,
    quad_char_field,
)
from ffql.algebra.poly import (
    Polynomial,
    factor,
    is_irreducible,
    is_squarefree,
    poly_arith,
    poly_gcd,
)

__all__ = [
    "ExtensionField",
    "FamilySpec",
    "Polynomial",
    "Z",
    "build_extension",
    "check_q",
    "divisor_function",
    "enumerate_family",
    "eta",
    "factor",
    "family_size",
    "field_arith",
    "is_irreducible",
    "is_prime",
    "is_squarefree",
    "mertens_sums",
    "mobius",
    "monic_polys",
    "monic_polys_upto",
    "poly_arith",
    "poly_gcd",
    "prime_count",
    "quad_char_field",
    "zeta_A",
]
