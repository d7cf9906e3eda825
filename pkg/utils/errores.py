"""
Jerarquía de errores del laboratorio.

Todas las operaciones numéricas lanzan subclases de LaboratorioError; la CLI
las captura y las traduce en un código de salida distinto de cero.
"""


class LaboratorioError(Exception):
    """Error base del laboratorio."""


class ConvexidadError(LaboratorioError):
    """El potencial no es (estrictamente) convexo en algún nodo."""

    def __init__(self, mensaje, nodo=None):
        super().__init__(mensaje if nodo is None else f"{mensaje} (nodo {nodo})")
        self.nodo = nodo


class ResolucionError(LaboratorioError):
    """La malla o la ventana no resuelven la cantidad pedida."""


class MallaIncompatibleError(LaboratorioError):
    """Dos objetos viven en mallas distintas; hay que remuestrear."""


class TrayectoriaInvalidaError(LaboratorioError):
    """La trayectoria no sirve para la operación (tipo o número de nodos)."""


class CuadraturaError(LaboratorioError):
    """La cuadratura adaptativa no alcanzó la tolerancia."""

    def __init__(self, mensaje, j=None, t=None, error_relativo=None):
        super().__init__(f"{mensaje} (peor caso j={j}, t={t}, error relativo={error_relativo})")
        self.j = j
        self.t = t
        self.error_relativo = error_relativo


class HessianoError(LaboratorioError):
    """El hessiano (t, s) no es semidefinido positivo."""

    def __init__(self, mensaje, nodo=None, autovalor=None):
        detalle = "" if autovalor is None else f", autovalor mínimo {autovalor:.3e}"
        super().__init__(f"{mensaje} (nodo {nodo}{detalle})")
        self.nodo = nodo
        self.autovalor = autovalor


class CompatibilidadError(LaboratorioError):
    """La ecuación linealizada no es resoluble: ν no anula el núcleo."""

    def __init__(self, mensaje, emparejamiento=None):
        super().__init__(mensaje if emparejamiento is None else f"{mensaje} (emparejamiento {emparejamiento:.3e})")
        self.emparejamiento = emparejamiento


class ConvergenciaError(LaboratorioError):
    """El descenso agotó su presupuesto de iteraciones."""

    def __init__(self, mensaje, historial=None):
        super().__init__(mensaje)
        self.historial = list(historial or [])


class ConfiguracionError(LaboratorioError):
    """Configuración de experimento inválida."""

    def __init__(self, campos):
        self.campos = list(campos)
        super().__init__("Configuración inválida: " + "; ".join(self.campos))


class ToleranciaError(LaboratorioError):
    """Una propiedad verificada no se cumple dentro de la tolerancia."""

    def __init__(self, nombre, medido, tolerancia):
        super().__init__(f"Falla '{nombre}': medido {medido:.6e}, tolerancia {tolerancia:.3e}")
        self.nombre = nombre
        self.medido = medido
        self.tolerancia = tolerancia
