"""Bounded formulas, their propositional translations, and Frege-style proofs."""

from .sigma import parse_formula, eval_formula, StringValue
from .prop import from_text, to_text
from .translation import LengthProfile, parse_profile, translate
from .oracle import is_tautology_bruteforce, BACKEND
from .proofs import check_proof, check_fplus, parse_proof, dumps_proof, proof_size
from .circuits import truth_table_system, truth_table_proof, make_formula_system, gen_phi_g, build_sound_g
from .simulation import simulate, bench_polynomiality, verify_membership_witness

__version__ = "0.1.0"
