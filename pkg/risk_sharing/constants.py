"""
Constantes numéricas compartidas por todo el paquete.

Centraliza tolerancias, tamaños de malla y límites combinatorios para que
los módulos de cálculo y los oráculos usen exactamente los mismos valores.
"""

# ============================================================================
# Tolerancias
# ============================================================================

# Suma de probabilidades de una ley discreta
PROBABILITY_TOLERANCE = 1e-12

# Comparación de niveles t en [0,1] (quantiles, nodos de núcleos)
LEVEL_TOLERANCE = 1e-12

# Tolerancia por defecto de verificaciones (CLI --tol)
DEFAULT_TOLERANCE = 1e-9

# Pendiente máxima admitida para un certificado de no acotación
CERTIFICATE_SLOPE_THRESHOLD = -1e-9

# Factibilidad de restricciones lineales
FEASIBILITY_TOLERANCE = 1e-9

# Brecha máxima admitida en la condición de regularidad (truncamiento)
REGULARITY_TOLERANCE = 1e-6

# ============================================================================
# Mallas de discretización
# ============================================================================

# Piezas lineales usadas para núcleos suaves (riesgo proporcional, Wang)
SMOOTH_KERNEL_GRID = 1024

# Malla equiprobable del chequeo discretizado del contraejemplo de riesgo moral
MORAL_HAZARD_GRID = 20_000

# Nivel de cola para mallas de oráculos sobre leyes no acotadas
UNBOUNDED_GRID_LEVEL = 0.999

# ============================================================================
# Límites
# ============================================================================

# Átomos máximos de un espacio finito (2^m restricciones por evento)
MAX_FINITE_SPACE_ATOMS = 12

# Asignaciones máximas que enumera el oráculo de fuerza bruta
MAX_ENUMERATION = 10**6

# Celdas máximas del oráculo de fuerza bruta
MAX_BRUTE_FORCE_CELLS = 8

# Remuestreos bootstrap para el error estándar de Monte Carlo
BOOTSTRAP_RESAMPLES = 200

# Valores de c en los que se verifica la afinidad de un certificado
CERTIFICATE_SCALES = (1.0, 10.0, 100.0)

