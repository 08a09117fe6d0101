"""Link-level simulation of complex quadrature spatial modulation (CQSM)
and the SM, GSM and QSM baselines."""

__version__ = "0.1.0"
