import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def cohort():
    from dp_planner import CohortConfig, generate_cohort

    return generate_cohort(CohortConfig(n=2000, seed=7))


@pytest.fixture(scope="session")
def cohort_queries():
    return [
        {
            "name": "hypertension_by_ethnicity",
            "group_by": "ethnicity",
            "where": {"attribute": "diagnosis", "op": "==", "value": "hypertension"},
            "extrapolation": True,
        },
        {
            "name": "hypertension_overall",
            "where": {"attribute": "diagnosis", "op": "==", "value": "hypertension"},
        },
        {
            "name": "medicated_by_sex",
            "group_by": "sex",
            "where": {"attribute": "on_medication", "op": "==", "value": True},
        },
        {
            "name": "seniors",
            "where": {"attribute": "age", "op": ">=", "value": 65},
        },
    ]
