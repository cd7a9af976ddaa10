from .airy import airy, airy_ai, airy_ai_prime
from .gamma import gamma, log_gamma, rgamma
from .pcf import pcf_d, pcf_d_prime

__all__ = ["airy", "airy_ai", "airy_ai_prime", "gamma", "log_gamma", "rgamma",
           "pcf_d", "pcf_d_prime"]
