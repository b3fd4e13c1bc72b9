"""
Option lookup for the computational modules.

The modules below hornmle.cli are plain functions over exact values and are also
imported inside scan worker processes, so they read options through get_option()
instead of touching django.conf.settings at import time.
"""
from django.conf import settings

DEFAULTS = {
    'SEED': 0,
    'JOBS': 1,
    'FORMAT': 'json',
    'DECIMAL_DIGITS': 10,
    'EXPANSION_DEGREE_LIMIT': 12,
    'COFACTOR_MAX_SIZE': 8,
    'MAX_BIJECTION_COLUMNS': 16,
    'SEARCH_BUDGET': 200000,
    'DEBUG_FRIENDLINESS': False,
    'FAMILY_BOUNDS': {'univariate': 17, 'trinomial': 17,
                      'linear_multiple': {'binomial': 8, 'trinomial': 3}},
}


def get_option(name):
    if settings.configured:
        configured = getattr(settings, 'RATMLE', {})
        if name in configured:
            return configured[name]
    return DEFAULTS[name]
