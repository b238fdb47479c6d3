from hypothesis import HealthCheck, settings

# the database strategies filter aggressively (consistent constraints,
# goals that must or must not be derivable), which can trip the filter
# health check on an unlucky run even though generation stays fast
settings.register_profile(
    "vud",
    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow],
)
settings.load_profile("vud")
