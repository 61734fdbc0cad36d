from algorithms.apm import direct_prox_step, penalized_gradient, run_apm, sliding_inner_step
from algorithms.apm_c import apm_c_step, run_apm_c
from algorithms.baselines import run_dngd, run_extra
from algorithms.schedules import ApmcScheduleNSC, ApmcScheduleSC, ApmSchedule, next_theta_nsc

__all__ = [
    "ApmSchedule",
    "ApmcScheduleNSC",
    "ApmcScheduleSC",
    "apm_c_step",
    "direct_prox_step",
    "next_theta_nsc",
    "penalized_gradient",
    "run_apm",
    "run_apm_c",
    "run_dngd",
    "run_extra",
    "sliding_inner_step",
]
