"""Exact lattice reduction, Seysen conditioning and lattice distortion bounds."""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, InvalidGamma, LatdistError, NonDividing, NotUnipotent,
                     NoWitnessFound, RankDeficient, ReductionFailure, Singular, ViolationFound)
from .exactmat import (RatMatrix, condition_number, determinant, dr_decompose, gram_schmidt,
                       inf_norm, inverse, is_unimodular, operator_norm)
from .lattice import (LatticeHandle, SuccessiveMinima, closest_vector, dual_basis, is_member,
                      shortest_vector, successive_minima, transference_check)
from .reduce import (ReducedBasis, SlideParams, check_certificate, dsvp_reduce, eta, hkz, lll,
                     pad_and_slide, size_reduce, slide_reduce)
from .seysen import (SeysenReport, reduced_basis_pipeline, s_condition, s_prime,
                     seysen_condition, seysen_reduce_basis)
from .distortion import (DistortionCertificate, GapDecision, brute_force_distortion,
                         distortion_lower_bound, distortion_upper_bound_check, gap_decide,
                         ldp_solve, m_factor, verify_mapping)
from .gadgets import (CvpAlphaInstance, LdpGadget, SvpToCvpBatch, build_ldp_gadget,
                      build_svp_to_cvp_batch, luk_tracy, random_integer_lattice, separation_demo)
