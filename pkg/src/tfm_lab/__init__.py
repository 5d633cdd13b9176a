"""Posted-price transaction fee mechanisms with burn: pricing, collusion-free
price sets, exact audits on finite bid grids and side-agreement search."""
from ._kernels import BACKEND
from .audits import (
    EnumerationSummary,
    audit_dsic,
    audit_mmic,
    audit_oca,
    audit_scp,
    dsic_by_characterization,
    enumerate_zero_revenue,
)
from .collusion_free import (
    ApproxReport,
    PriceSet,
    collusion_free_prices,
    exclusion_witness,
    welfare_revenue_approx,
    worst_case_C,
    worst_case_report,
)
from .collusion_lab import (
    Collusion,
    builtin_collusion,
    check_collusion_ic,
    check_collusion_ir,
    compose,
    search_ic_ir_collusion,
)
from .constructions import (
    CubicSpec,
    TruncEqualRevenueSpec,
    build_cubic,
    build_piecewise_uniform,
    build_sqrtlog_family,
    build_trunc_equal_revenue,
    epsilon_smear,
)
from .distribution import (
    ContinuousDistribution,
    DiscreteDistribution,
    VirtualValueCurve,
    is_discrete_regular,
    is_regular,
    root_set,
    truncated_exponential,
    uniform,
    virtual_value,
    virtual_value_discrete,
)
from .mechanism_core import (
    BidGrid,
    GridMechanism,
    Outcome,
    Profile,
    builtin_mechanism,
    check_basic_properties,
)
from .pricing import PricePoint, myerson_identity_check, myerson_price, price_curves, price_point, revenue
from ._report import AuditReport, Witness

__version__ = "0.1.0"
