"""Flight-schedule re-accommodation: insert new round trips into an
existing schedule by re-timing, cruise-time compression and aircraft swaps,
solved exactly as mixed-integer second-order-cone programs."""

__version__ = "0.1.0"
