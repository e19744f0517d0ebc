"""Band/gap structure of the Laplacian on a dilated honeycomb quantum graph.

The lattice has hexagons with antipodal edge pairs of lengths a, b, c and a
delta coupling of strength alpha at every vertex.  The package evaluates the
closed-form secular condition, decides band membership through the phase
envelope, scans energy windows into bands and gaps (positive and negative
branch), enumerates and verifies flat bands, applies the explicit gap
criteria with their number-theoretic coupling thresholds, and cross-checks
everything against brute-force grid oracles.
"""

from .core import (
    DEFAULT_DIRICHLET_TOL,
    DirichletPointError,
    EnergyPoint,
    FloquetPhase,
    HexGeometry,
    MMatrix,
    SineTriple,
    VertexCoupling,
    assemble_m_matrix,
    det_m_closed_form,
    dispersion,
    dispersion_negative,
    sine_triple,
)
from .bands import (
    BandDecision,
    CellWavefunction,
    Decision,
    RhsEnvelope,
    band_membership,
    flat_band_energies,
    negative_spectrum_scan,
    rhs_envelope,
    rhs_envelope_negative,
    scan_spectrum,
    solve_cell_wavefunction,
    trig_polynomial_min,
    verify_flat_band,
)
from .gaps import (
    GapAtZero,
    GapDiagnostics,
    ThresholdReport,
    cot_dominance,
    gap_diagnostics_bc,
    gc1,
    gc1_tangent_form,
    gc2,
    gc2_equivalent_bc,
    gc_negative,
    nearest_int_frac,
    negative_gap_at_zero,
    tangent_sum,
    tangent_sum_bc,
    tangent_margin_bc,
    thresholds_bc,
)
from .numtheory import (
    CommensurabilityWitness,
    ContinuedFraction,
    Convergent,
    ExactRatio,
    ExplicitCF,
    GapCenter,
    NumericRatio,
    QuadraticSurd,
    RatioClass,
    RatioClassKind,
    RationalRatioError,
    approx_constant,
    cf_expand,
    classify_ratio,
    commensurability_witness,
    convergents,
    predicted_gap_centers,
    ratio_divide,
)
from .oracle import GridSpec, band_membership_grid, det_numeric, rhs_extrema_grid, trig_min_grid
from .report import (
    FlatBand,
    SampleRow,
    SpectrumReport,
    report_from_json,
    report_to_json,
    write_samples_csv,
)

__version__ = "0.1.0"
