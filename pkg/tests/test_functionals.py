import numpy as np
import pytest

from conftest import N_PRUEBA, bache
from utils.corpus import medida_coseno
from utils.errores import MallaIncompatibleError, TrayectoriaInvalidaError
from utils.functionals import (
    FunctionalReport,
    calabi_energy,
    constante_poincare,
    convexity_scan,
    derivada_fd,
    energy_e,
    entropy,
    entropy_convexity_gap,
    entropy_legendre_gap,
    mabuchi,
    mabuchi_gradient,
    mabuchi_toric,
    orden_observado,
    second_variation_check,
    strict_convexity_imu,
    subslope_check,
)
from utils.geodesic import MetricPath, weak_geodesic
from utils.potential_model import COORD_MOMENTO, GridMeasure, fubini_study, malla_momento


@pytest.fixture
def uniforme():
    y = malla_momento(N_PRUEBA)
    return GridMeasure(COORD_MOMENTO, y, np.ones_like(y))


def test_reporte_de_una_parabola():
    t = np.linspace(0, 1, 11)
    reporte = FunctionalReport.desde_valores(t, 3 * t**2)
    assert np.allclose(reporte.segundas, 6.0)
    assert reporte.min_segunda == pytest.approx(6.0)
    assert reporte.cumple()
    df = reporte.a_dataframe()
    assert list(df.columns) == ["t", "value", "d1", "d2"]
    assert np.isnan(df["d2"].iloc[0]) and np.isnan(df["d1"].iloc[-1])


def test_holgura_relativa_a_la_escala():
    t = np.linspace(0, 1, 5)
    reporte = FunctionalReport.desde_valores(t, 100.0 - 1e-6 * t**2)
    assert reporte.escala == pytest.approx(100.0)
    assert reporte.cumple(tol=1e-6)
    assert not reporte.cumple(tol=1e-10)


def test_funcionales_se_anulan_en_fubini_study(fs):
    assert energy_e(fs) == pytest.approx(0.0, abs=1e-12)
    assert mabuchi_toric(fs) == pytest.approx(0.0, abs=1e-12)
    assert mabuchi(fs) == pytest.approx(0.0, abs=1e-10)
    assert calabi_energy(fs) == pytest.approx(0.0, abs=1e-12)


def test_fubini_study_es_punto_critico_de_la_k_energia(fs):
    assert np.max(np.abs(mabuchi_gradient(fs))) < 1e-10


def test_entropia_de_una_medida_consigo_es_cero(uniforme):
    assert entropy(uniforme, uniforme) == pytest.approx(0.0)


def test_entropia_exige_la_misma_malla(uniforme):
    y = malla_momento(2 * N_PRUEBA)
    with pytest.raises(MallaIncompatibleError):
        entropy(GridMeasure(COORD_MOMENTO, y, np.ones_like(y)), uniforme)


def test_dualidad_de_legendre_de_la_entropia(uniforme, rng):
    mu = medida_coseno(N_PRUEBA)
    for _ in range(20):
        f = rng.normal(size=N_PRUEBA + 1)
        assert entropy_legendre_gap(mu, uniforme, f) >= -1e-12
    optimo = np.log(mu.densidad / uniforme.densidad)
    assert entropy_legendre_gap(mu, uniforme, optimo) == pytest.approx(0.0, abs=1e-10)


def test_entropia_convexa_en_mezclas(uniforme):
    mu = medida_coseno(N_PRUEBA)
    otra = GridMeasure(COORD_MOMENTO, uniforme.nodos, 2 * uniforme.nodos)
    for s in np.linspace(0, 1, 6):
        assert entropy_convexity_gap(mu, otra, uniforme, s) <= 1e-12


def test_diferencia_finita_de_un_funcional_lineal(suave):
    v = 1.0 + np.cos(0.5 * np.pi * suave.malla)

    def funcional(u):
        return float(np.sum(u.valores))

    assert derivada_fd(funcional, suave, v, 1e-3) == pytest.approx(-np.sum(v))
    orden, derivada = orden_observado(funcional, suave, v)
    assert orden == np.inf
    assert derivada == pytest.approx(-np.sum(v))


def test_k_energia_torica_convexa_en_geodesicas(fs, suave):
    path = weak_geodesic(fs, suave, 9)
    valores = [mabuchi_toric(u) for u in path.potenciales]
    assert np.min(np.diff(valores, 2)) >= -1e-12


def test_escaneo_de_convexidad_solo_en_geodesicas(fs):
    generica = MetricPath(np.linspace(0, 1, 3), [fs, fs, fs], "generic")
    with pytest.raises(TrayectoriaInvalidaError):
        convexity_scan(generica)
    with pytest.raises(TrayectoriaInvalidaError):
        strict_convexity_imu(generica, medida_coseno(N_PRUEBA))


def test_constante_de_poincare_de_la_medida_uniforme():
    y = malla_momento(256)
    delta = constante_poincare(GridMeasure(COORD_MOMENTO, y, np.ones_like(y)))
    assert delta == pytest.approx(2.0, abs=1e-2)


def test_orden_infinito_de_la_energia(suave):
    v = 0.1 * np.cos(np.pi * suave.malla)
    orden, derivada = orden_observado(energy_e, suave, v)
    assert orden == np.inf
    assert np.isfinite(derivada)


def test_segunda_variacion_en_una_geodesica():
    path = weak_geodesic(fubini_study(128), bache(128), 9)
    discrepancia = second_variation_check(path)
    assert np.isfinite(discrepancia)
    assert discrepancia < 1e-2


def test_segunda_variacion_exige_tres_nodos(fs, suave):
    with pytest.raises(TrayectoriaInvalidaError):
        second_variation_check(weak_geodesic(fs, suave, 2))


def test_subpendiente_desde_fubini_study(fs, suave):
    lhs, rhs, holgura = subslope_check(fs, suave)
    assert rhs == pytest.approx(0.0, abs=1e-6)
    assert lhs >= -1e-8
    assert holgura >= -1e-8


def test_subpendiente_hacia_fubini_study(fs, suave):
    lhs, rhs, holgura = subslope_check(suave, fs)
    assert rhs <= 0.0
    assert holgura >= -1e-4


def test_subpendiente_trivial(suave):
    assert subslope_check(suave, suave) == (0.0, 0.0, 0.0)


def test_brecha_de_convexidad_estricta(fs, suave):
    mu = medida_coseno(N_PRUEBA)
    brecha, cota = strict_convexity_imu(weak_geodesic(fs, suave, 9), mu)
    assert cota > 0
    assert brecha > 0
    assert brecha >= cota - 1e-6


def test_convexidad_estricta_en_trayectoria_constante(fs):
    brecha, cota = strict_convexity_imu(weak_geodesic(fs, fs, 5), medida_coseno(N_PRUEBA))
    assert brecha == pytest.approx(0.0, abs=1e-12)
    assert cota == 0.0
