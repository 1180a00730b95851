"""frobfix: exact fixed points of Frobenius endomorphisms on explicit groups.

Layers, bottom up:

  abgroup   exact f.g. abelian groups (Smith form, kernels/cokernels with
            change-of-basis homs, localization, enumeration oracle)
  fixpoint  two-term complex [M --(1-phi)--> M]: h0/h1, graded assembly,
            total-complex fixed points
  indgroup  directed towers of groups, stabilization, colimit-vanishing
            certificates
  curves    small finite fields F_q as explicit tables, elliptic curves,
            P^1 and points: Frobenius, Verschiebung, units, Pic, weight-1
            fixed points, rigidity reports
  ktheory   K-theory and stable-stem tables fed through the generic pipeline
  thh       truncated Kahler differentials with semilinear Frobenius
  golden    closed-form expected tables for the CLI check mode (data only)
  cli       frobfix command line
"""

from .abgroup import (FgAbGroup, GroupHom, IntMatrix, LocalizedGroup,
                      Presentation, RATIONAL, SizeError, TRIVIAL, Z, Zmod,
                      cokernel, enumerate_elements, group_from_presentation,
                      kernel, localize, smith_normal_form)
from .fixpoint import (Endo, FixedPointPair, GradedEndo, fixed_points,
                       fixed_points_mult, graded_fixed_points,
                       total_complex_fixed_points)
from .indgroup import (IndAbGroup, ResourceCeilingError, colim_vanishes,
                       ind_fixed_points, roots_of_unity_ind, stabilize)
from .curves import (EllipticCurveSpec, FqField, canonical_modulus,
                     curve_order, get_field, isogeny_degree_form,
                     kernel_count, load_corpus, odd_power_sharpness,
                     pic_group, point_group, point_independence_check,
                     rigidity_compare, trace_of_frobenius, units_group,
                     verschiebung_on_points, weight1_frobenius_cohomology)
from .ktheory import (frobenius_k, frobenius_k_rational, frobenius_pi_table,
                      k_fbar, milnor_comparison_fbar, pi_table, run_pipeline)
from .thh import (artin_schreier_fixed, frobenius_thh_rigidity, hkr_thh,
                  omega)

__version__ = "0.1.0"
