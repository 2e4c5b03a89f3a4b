"""Interruption-flow reliability evaluation for radial distribution networks."""
from .evaluation import (IflowState, ReliabilityReport, ens, ens_bounds, ens_from_full_interruption,
                         evaluate_iflows, node_balance_residual, reliability_report)
from .islanding import RestorationZone, ZoneError, effective_coefficients, evaluate_with_zones
from .network import (Network, NetworkError, StructuralSummary, format_network, parse_network,
                      read_network, set_switches, structural_summary)
from .oracle import oracle_indices, oracle_sap
from .sap import (BudgetExceeded, SapInstance, SapSolution, big_m, export_milp, solve_exact_dp,
                  solve_heuristic)
from .economics import EconomicParams, EconomicSweep, sweep

__all__ = [
    "BudgetExceeded", "EconomicParams", "EconomicSweep", "IflowState", "Network", "NetworkError",
    "ReliabilityReport", "RestorationZone", "SapInstance", "SapSolution", "StructuralSummary",
    "ZoneError", "big_m", "effective_coefficients", "ens", "ens_bounds", "ens_from_full_interruption",
    "evaluate_iflows", "evaluate_with_zones", "export_milp", "format_network", "node_balance_residual",
    "oracle_indices", "oracle_sap", "parse_network", "read_network", "reliability_report",
    "set_switches", "solve_exact_dp", "solve_heuristic", "structural_summary", "sweep",
]
