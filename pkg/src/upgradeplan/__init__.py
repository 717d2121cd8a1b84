"""Cost-minimal upgrade schedules for a system inside a long-lived asset."""

from .base_solver import (
    equidistant_cost,
    solve_base,
    solve_concave,
    solve_convex,
    solve_general_numeric,
    solve_s_shaped,
    tail_cost,
)
from .costfn import (
    classify_shape,
    eval_cycle_cost,
    eval_cycle_cost_derivative,
    find_inflection,
    upgrade_bound,
    upper_bound_upgrades,
)
from .errors import (
    DomainError,
    InstanceError,
    InstanceSyntaxError,
    QuadratureError,
    TechnicalRequirementError,
    UpgradePlanError,
)
from .functions import Constant, Logistic, Piecewise, Polynomial, Power, Scaled, Sum, function_from_dict
from .instance_file import instance_from_dict, instance_to_dict, load_instance, parse_instance, serialize_instance
from .model import INFINITY, CostModel, Instance, Policy, ShapeClass, SolveResult, policy_cost
from .oracle import GridSpec, oracle_solve
from .overhaul_dp import DpTable, solve, solve_general, solve_overhaul_only
from .sensitivity import (
    DominanceCheck,
    SweepResult,
    linearized_dominance_check,
    sweep_c0,
    sweep_cd,
    sweep_overhaul_count,
)

__version__ = "0.1.0"
