import numpy as np
import pytest

from conftest import N_PRUEBA, bache
from utils.errores import ConvexidadError, MallaIncompatibleError, ResolucionError
from utils.potential_model import (
    COORD_MOMENTO,
    GridMeasure,
    SymplecticPotential,
    TwistForm,
    fubini_study,
    inverse_legendre,
    legendre,
    malla_momento,
    moment_measure,
    moment_of,
    perturb,
    phi_fs,
    potential_at,
    ricci_reference,
    scalar_curvature,
    segunda_diferencia,
    volumen_en_fs,
)


def test_fubini_study_tiene_factor_hessiano_uno(fs):
    assert np.allclose(fs.factor_hessiano, 1.0)
    assert np.allclose(fs.h, fs.malla * (1 - fs.malla))
    assert np.allclose(fs.kahler, 0.0, atol=1e-14)
    assert np.allclose(fs.momento_fs, fs.malla)


def test_curvatura_escalar_constante_en_fubini_study(fs):
    assert np.allclose(scalar_curvature(fs), 2.0, atol=1e-8)


def test_curvatura_escalar_exige_malla_minima():
    with pytest.raises(ResolucionError):
        scalar_curvature(fubini_study(8))


def test_segunda_diferencia_exacta_en_cuadraticas():
    x = malla_momento(20)
    assert np.allclose(segunda_diferencia(3 * x**2 - x, x[1] - x[0]), 6.0)


def test_potencial_no_convexo_se_rechaza():
    x = malla_momento(N_PRUEBA)
    with pytest.raises(ConvexidadError) as error:
        SymplecticPotential(-5 * x**2)
    assert error.value.nodo is not None


def test_mallas_distintas_no_se_mezclan(fs):
    with pytest.raises(MallaIncompatibleError):
        fs.exigir_misma_malla(fubini_study(2 * N_PRUEBA))


def test_perturb_resta_la_direccion(suave):
    v = np.sin(np.pi * suave.malla)
    perturbado = perturb(suave, v, 0.1)
    assert np.allclose(perturbado.valores, suave.valores - 0.1 * v)


def test_legendre_inversa_de_fubini_study_es_log_1_mas_es(fs):
    radial = inverse_legendre(fs, nodos=2001)
    assert np.allclose(radial.valores, phi_fs(radial.s_grid), atol=1e-10)
    assert np.allclose(radial.kahler, 0.0, atol=1e-10)
    assert np.allclose(radial.momentos, 1 / (1 + np.exp(-radial.s_grid)))


def test_ida_y_vuelta_de_legendre(fs):
    regreso = legendre(inverse_legendre(fs, nodos=2001), N_PRUEBA)
    assert np.allclose(regreso.valores, 0.0, atol=1e-6)


def test_ventana_pequena_no_resuelve_los_polos(fs):
    with pytest.raises(ResolucionError):
        inverse_legendre(fs, ventana=5.0)


def test_medida_de_monge_ampere_tiene_masa_uno(fs):
    medida = moment_measure(inverse_legendre(fs, nodos=2001))
    assert medida.masa == pytest.approx(1.0, abs=1e-3)


def test_masa_de_monge_ampere_en_la_ventana_de_trabajo(fs, suave):
    for u in (fs, suave):
        masa = moment_measure(inverse_legendre(u)).masa
        assert 1.0 - 1e-6 <= masa <= 1.0 + 1e-8


def test_potencial_en_eje_s_se_anula_en_fubini_study(fs):
    s = np.array([-np.inf, -3.0, 0.0, 2.5, np.inf])
    assert np.allclose(potential_at(fs, s), 0.0, atol=1e-12)


def test_potencial_en_eje_s_coincide_con_la_representacion_radial():
    u = bache(amplitud=1.0)
    radial = inverse_legendre(u, nodos=2001)
    s = np.linspace(-6, 6, 13)
    assert np.allclose(potential_at(u, s), radial.spline(s) - phi_fs(s), atol=1e-6)


def test_moment_of_es_la_identidad_en_fubini_study(fs):
    y = np.linspace(0, 1, 11)
    assert np.allclose(moment_of(fs, y), y, atol=1e-12)


def test_volumen_en_coordenada_de_referencia(fs):
    volumen = volumen_en_fs(fs)
    assert volumen.coordenada == COORD_MOMENTO
    assert np.allclose(volumen.densidad, 1.0)
    assert volumen.masa == pytest.approx(1.0)


def test_medida_con_densidad_negativa_se_rechaza():
    y = malla_momento(10)
    with pytest.raises(ValueError):
        GridMeasure(COORD_MOMENTO, y, y - 0.5)


def test_masa_declarada_inconsistente_se_rechaza():
    y = malla_momento(10)
    with pytest.raises(ValueError):
        GridMeasure(COORD_MOMENTO, y, np.ones_like(y), masa=2.0)


def test_forma_de_torsion_multiplo_de_fs():
    alpha = TwistForm.multiplo_fs(0.2, N_PRUEBA)
    assert alpha.masa == pytest.approx(0.2)
    assert alpha.como_medida().masa == pytest.approx(0.2)


def test_referencia_de_ricci_tiene_masa_dos():
    assert ricci_reference(40.0, 4001).masa == pytest.approx(2.0, abs=1e-8)
