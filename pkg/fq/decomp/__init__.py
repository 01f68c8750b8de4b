from fq.decomp.__version__ import version as __version__  # noqa
from fq.decomp.characters import AdditiveCharacter, MultiplicativeCharacter  # noqa
from fq.decomp.charsums import kloosterman_K, sum_mixed, sum_S, sum_T  # noqa
from fq.decomp.config import ExperimentConfig  # noqa
from fq.decomp.decompose import DecompositionResult, ThresholdParams, extract_subset, m_of_z, partition  # noqa
from fq.decomp.energy import additive_energy, multiplicative_energy  # noqa
from fq.decomp.field import FieldCtx, build_field  # noqa
from fq.decomp.ratfunc import RationalFunction, is_exceptional, parse_ratfunc  # noqa
from fq.decomp.results import VerificationRecord, emit_csv  # noqa
from fq.decomp.sets import FSubset  # noqa
from fq.decomp.setspec import parse_set_spec  # noqa
from fq.decomp.suites import run_suite  # noqa
from fq.include import decomp as include

PACKAGE_PATH = include.PACKAGE_PATH
