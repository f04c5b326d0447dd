import pytest

from inhomspdc.apertures import CircularAperture, DeltaAperture, OpticalGeometry
from inhomspdc.dispersion import CrystalSpec, PumpSpec, air_gap
from inhomspdc.interference import TwoCrystalSystem

# Lines recorded by the acceptance module, echoed in the terminal summary.
ACCEPTANCE_LINES = []

WAVELENGTH = 351.1e-9
THICKNESS = 0.5e-3
DISPERSION = 0.19e-9
WALKOFF = 0.07
D1 = 0.75
APERTURE_B = 2.5e-3


@pytest.fixture
def pump():
    return PumpSpec(WAVELENGTH)


def make_system(axes="parallel", d=17.5e-3, aperture=None, thickness=THICKNESS,
                walkoff=WALKOFF, d1=D1, gap=None):
    p = PumpSpec(WAVELENGTH)
    crystal = CrystalSpec(thickness, DISPERSION, (walkoff, 0.0))
    aperture = CircularAperture(APERTURE_B) if aperture is None else aperture
    return TwoCrystalSystem.from_crystal(
        crystal, axes, gap if gap is not None else air_gap(d, p),
        OpticalGeometry(d1), aperture, p)


@pytest.fixture
def fig10_parallel():
    return make_system("parallel")


@pytest.fixture
def fig10_antiparallel():
    return make_system("antiparallel")


@pytest.fixture(params=["delta", "circular"])
def aperture(request):
    return DeltaAperture() if request.param == "delta" else CircularAperture(APERTURE_B)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
