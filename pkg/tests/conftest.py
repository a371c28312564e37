import pytest

import levyclt as lc


@pytest.fixture(scope="session")
def pareto_model():
    # jump density 3 x^-4 on x >= 1, unit gaussian part: sigma^2 = 4,
    # sigma_1 = 1, kappa = 1, drift -3/2
    return lc.build_model(1.0, lc.PowerTail(3.0, 3.0, 1.0, "positive"))


@pytest.fixture(scope="session")
def pareto_pure_jump():
    return lc.build_model(0.0, lc.PowerTail(3.0, 3.0, 1.0, "positive"))


@pytest.fixture(scope="session")
def mixture_model():
    return lc.build_model(
        0.5,
        lc.TwoSidedMixture(pos={"amplitude": 1.0, "index": 4.0, "cut": 1.0},
                           neg={"amplitude": 2.0, "index": 3.5, "cut": 2.0}))


@pytest.fixture(scope="session")
def kou_model():
    return lc.build_model(0.25,
                          lc.CompoundPoissonParametric(2.0, 0.8, 0.5, 0.6))


@pytest.fixture(scope="session")
def logpert3_model():
    return lc.build_model(0.0, lc.LogPerturbedPowerTail(3.0))


@pytest.fixture(scope="session")
def logpert15_model():
    return lc.build_model(0.0, lc.LogPerturbedPowerTail(1.5))


@pytest.fixture(scope="session")
def brownian_model():
    return lc.build_model(4.0, lc.ZeroMeasure())


@pytest.fixture(scope="session")
def all_models(pareto_model, mixture_model, kou_model, logpert3_model,
               logpert15_model, brownian_model):
    return {
        "pareto": pareto_model,
        "mixture": mixture_model,
        "kou": kou_model,
        "logpert3": logpert3_model,
        "logpert15": logpert15_model,
        "brownian": brownian_model,
    }
