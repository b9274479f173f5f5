from .checker import MissingVariables, Violation, check_feasibility, nodal_residual
from .reports import (CNR, PNR, Comparison, Curtailment, ScheduleReport, SocSeries, SwitchEvent,
                      VariantRun, binding_lines, compare_variants, cost_breakdown,
                      curtailment_report, ess_report, named, per_scenario_cost, schedule_report,
                      switching_schedule)

__all__ = [
    "CNR", "PNR", "Comparison", "Curtailment", "MissingVariables", "ScheduleReport", "SocSeries",
    "SwitchEvent", "VariantRun", "Violation", "binding_lines", "check_feasibility",
    "compare_variants", "cost_breakdown", "curtailment_report", "ess_report", "named",
    "nodal_residual", "per_scenario_cost", "schedule_report", "switching_schedule",
]
