"""Frobenius and tight closure computations in GF(p)[x,y,z]/(x^d + y^d - z^d)."""

from .certificates import (
    build_certificate,
    build_membership_certificate,
    build_nonmembership_certificate,
    van_zeipel_det,
    verify_certificate,
)
from .closure import (
    ClosureVerdict,
    FrobeniusIdeal,
    SearchBounds,
    VerdictKind,
    decide_tight_closure,
    frobenius_power,
    in_frobenius_closure,
)
from .errors import *  # noqa: F401,F403
from .gfp import FpElement, PrimeModulus, binom_mod_p, inv_mod_p
from .hilbert_kunz import HKSequence, colength, hk_compare, hk_sequence
from .membership import membership, syzygy_space
from .ring import NormalHomogPoly, RingContext, dim_graded_piece, normal_form
from .scan import ExperimentConfig, ScanRecord, emit_report, run_experiment
from .semistability import (
    InstabilityWitness,
    SlopeData,
    balanced_twist,
    detect_instability,
    genus_plane_curve,
    lemma_syzygy_construction,
)

__version__ = "0.1.0"
