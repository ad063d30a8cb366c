"""Session pi-calculus to linear pi-calculus: types, checkers, encoding and reduction."""

from types import ModuleType as _ModuleType

from .algebra import (
    TypeAlgebraError, carried_subst, complement, complement_pi, complement_session, dual_pi,
    dual_session, equiv, equiv_pi, equiv_session, subst, subtype, subtype_pi, subtype_session,
    unfold,
)
from .correspondence import (
    CorrespondenceReport, GenConfig, check_completeness, check_soundness,
    check_subject_reduction, check_typing_theorem, gen_session_type, gen_typed_process, mutants,
)
from .encoder import (
    NameSupply, encode, encode_env, encode_process, encode_type, encode_value,
    restriction_annotation,
)
from .parser import (
    ParseError, load_program, parse_context, parse_pi_process, parse_pi_type,
    parse_session_process, parse_session_type,
)
from .pi_check import check_pi_process, check_pi_value, combine, pi_typechecks
from .printer import pretty
from .semantics import (
    Fault, Step, concurrent_rounds, decompose, format_trace, hook_equiv, plug, run, step_pi, step_session,
    struct_equiv,
)
from .session_check import Derivation, TypingError, check_process, check_value, typechecks
from .syntax import alpha_eq, well_formed

__all__ = sorted(name for name, obj in list(globals().items())
                 if not name.startswith("_") and not isinstance(obj, _ModuleType))
