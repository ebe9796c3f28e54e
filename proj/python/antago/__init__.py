"""Simulation and verification of an antagonistic pair of soft hydraulic bellow actuators."""

from ._core import (
    ActuatorGeometry,
    ControllerGains,
    DomainError,
    FluidParams,
    ObserverState,
    ParameterError,
    PlantParams,
    PlantState,
    Scenario,
    ScenarioParseError,
    StepperParams,
    closed_loop_field,
    control_flows,
    force_estimate,
    hamiltonian,
    hamiltonian_gradient,
    lyapunov_function,
    min_jerk_position,
    observer_rate,
    open_loop_field,
    presets,
    scalar_keys,
    sigma,
    simulate,
    stepper_target,
    stepper_target_sampled,
    total_mass,
    validate_gains,
    verify,
    volume_curvatures,
    volume_gradients,
    volumes,
)

__all__ = [name for name in dir() if not name.startswith("_")]
