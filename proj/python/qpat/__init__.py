from ._qpat import (
    ConfigError,
    DomainError,
    Error,
    IoError,
    NumericalError,
    PreconditionError,
    RunConfig,
    Scene,
    export_slices,
    kernel_dt_limit,
    kernel_dtt_limit,
    kernel_eval,
    kernel_large_t,
    mc_kernel_integrals,
    pipeline_analytic,
    read_field,
    reconstruct,
    set_thread_count,
    synthesize,
    t_support_bound,
    verify,
    write_field,
)

__all__ = [name for name in dir() if not name.startswith("_")]
