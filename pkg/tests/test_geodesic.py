import numpy as np
import pytest
from scipy.integrate import trapezoid

from conftest import bache
from utils.errores import ConvexidadError, TrayectoriaInvalidaError
from utils.geodesic import (
    HessianField,
    MetricPath,
    affine_kahler_path,
    endpoint_velocity,
    hessiano_diferencias,
    hmae_residual,
    mabuchi_distance,
    orbit_slice,
    path_speed,
    subgeodesic_make,
    weak_geodesic,
)
from utils.potential_model import SymplecticPotential, fubini_study, malla_momento


def test_geodesica_debil_interpola_linealmente(fs, suave):
    path = weak_geodesic(fs, suave, 5)
    assert path.tipo == "geodesic"
    assert path.n_t == 5
    assert np.allclose(path.potenciales[2].valores, 0.5 * suave.valores)
    assert path.inicio is fs and path.fin is suave


def test_geodesica_no_afin_se_rechaza(fs, suave):
    with pytest.raises(TrayectoriaInvalidaError):
        MetricPath(np.linspace(0, 1, 3), [fs, suave, fs], "geodesic")


def test_particion_no_uniforme_se_rechaza(fs):
    with pytest.raises(TrayectoriaInvalidaError):
        MetricPath(np.array([0.0, 0.3, 1.0]), [fs, fs, fs], "generic")


def test_hessiano_por_diferencias_de_una_cuadratica():
    t = np.linspace(0, 1, 6)
    s = np.linspace(-1, 1, 9)
    T, S = np.meshgrid(t, s, indexing="ij")
    hess = hessiano_diferencias(T**2 + S**2 + T * S, t, s)
    assert np.allclose(hess.tt, 2.0)
    assert np.allclose(hess.ss, 2.0)
    assert np.allclose(hess.ts, 1.0)
    assert np.allclose(hess.determinante(), 3.0)
    assert np.allclose(hess.autovalor_minimo(), 1.0)


def test_emparejamiento_mixto_de_un_hessiano_consigo_es_el_doble_del_determinante():
    uno = np.ones((1, 1))
    hess = HessianField(np.zeros(1), np.zeros(1), 3 * uno, uno, 2 * uno)
    assert hess.emparejamiento_mixto(hess)[0, 0] == pytest.approx(2 * hess.determinante()[0, 0])


def test_residuo_hmae_nulo_en_trayectoria_constante(fs):
    assert hmae_residual(weak_geodesic(fs, fs, 5)) == 0.0


def test_residuo_hmae_exige_tres_nodos(fs, suave):
    with pytest.raises(TrayectoriaInvalidaError):
        hmae_residual(weak_geodesic(fs, suave, 2))


def test_bulge_negativo_es_invalido(fs):
    with pytest.raises(ValueError):
        subgeodesic_make(fs, fs, -1.0, t_nodos=5)


def test_bulge_cero_es_la_geodesica(fs, suave):
    assert subgeodesic_make(fs, suave, 0.0, t_nodos=5).tipo == "geodesic"


def test_bulge_grande_rompe_la_convexidad_de_una_rebanada(fs):
    with pytest.raises(ConvexidadError):
        subgeodesic_make(fs, fs, 10.0, t_nodos=5)


def test_rebanada_de_orbita_es_una_traslacion_afin(fs):
    u = orbit_slice(fs, 0.5, escala=2.0)
    assert np.allclose(u.valores, -2.0 * fs.malla)
    assert np.allclose(u.factor_hessiano, 1.0)


def test_velocidad_constante_a_lo_largo_de_la_geodesica(fs, suave):
    velocidad = path_speed(weak_geodesic(fs, suave, 9))
    esperada = trapezoid((suave.valores - fs.valores) ** 2, fs.malla)
    assert np.allclose(velocidad, esperada)


def test_distancia_nula_entre_potenciales_iguales(suave):
    assert mabuchi_distance(suave, suave) == 0.0


def test_residuo_hmae_decrece_al_refinar():
    residuos = [
        hmae_residual(weak_geodesic(fubini_study(n), bache(n), t_nodos))
        for n, t_nodos in ((256, 9), (1024, 33))
    ]
    assert residuos[0] >= 4 * residuos[1]


def test_residuo_hmae_de_la_trayectoria_afin(fs, suave):
    geodesica = hmae_residual(weak_geodesic(fs, suave, 9))
    afin = hmae_residual(affine_kahler_path(fs, suave, 9))
    assert afin > 10 * geodesica


def test_velocidad_en_los_extremos_de_una_trayectoria_constante(suave):
    path = weak_geodesic(suave, suave, 5)
    assert np.allclose(endpoint_velocity(path, "start"), 0.0, atol=1e-12)
    assert np.allclose(endpoint_velocity(path, "end"), 0.0, atol=1e-12)


def test_velocidad_al_sumar_una_constante(suave):
    path = weak_geodesic(suave, SymplecticPotential(suave.valores - 0.3), 5)
    assert np.allclose(endpoint_velocity(path, "start"), 0.3, atol=1e-9)
    assert np.allclose(endpoint_velocity(path, "end"), 0.3, atol=1e-9)


@pytest.mark.parametrize("extremo", ["start", "end"])
def test_velocidad_en_los_extremos_de_una_geodesica(fs, suave, extremo):
    velocidad = endpoint_velocity(weak_geodesic(fs, suave, 33), extremo)
    assert np.allclose(velocidad, -(suave.valores - fs.valores), atol=1e-4)


def test_extremo_desconocido(fs):
    with pytest.raises(ValueError):
        endpoint_velocity(weak_geodesic(fs, fs, 3), "medio")


@pytest.fixture
def ondulado():
    x = malla_momento(64)
    return SymplecticPotential(0.02 * np.cos(2 * np.pi * x))


def test_distancia_coincide_con_la_norma_l2_de_la_diferencia(fs, suave):
    esperada = np.sqrt(trapezoid((suave.valores - fs.valores) ** 2, fs.malla))
    assert mabuchi_distance(fs, suave) == pytest.approx(esperada, rel=1e-3)


def test_distancia_simetrica(suave, ondulado):
    assert mabuchi_distance(suave, ondulado) == pytest.approx(mabuchi_distance(ondulado, suave), rel=1e-3)


@pytest.mark.parametrize("c", [0.3, -0.3])
def test_distancia_a_un_desplazamiento_constante(suave, c):
    trasladado = SymplecticPotential(suave.valores - c)
    assert mabuchi_distance(suave, trasladado) == pytest.approx(abs(c), rel=1e-8)


def test_desigualdad_triangular(fs, suave, ondulado):
    directa = mabuchi_distance(fs, ondulado)
    assert directa <= mabuchi_distance(fs, suave) + mabuchi_distance(suave, ondulado) + 1e-6
