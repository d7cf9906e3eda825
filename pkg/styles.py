FUENTE = 'Outfit'

COLORES = [
    '#e74c3c',
    '#2980b9',
    '#27ae60',
    '#8e44ad',
    '#f39c12',
    '#16a085',
    '#2c3e50',
    '#d35400'
]

TITULO_STYLE = {
    'font': {'size': 18, 'color': '#2c3e50', 'family': FUENTE},
    'x': 0.5,
    'y': 1
}

LAYOUT_STYLE = {
    'margin': {'l': 60, 'r': 40, 't': 60, 'b': 60},
    'paper_bgcolor': 'white',
    'plot_bgcolor': '#f8f9fa',
    'font': {'family': FUENTE, 'size': 12, 'color': '#34495e'},
    'height': 450,
    'showlegend': True,
    'legend': {'orientation': 'h', 'yanchor': 'bottom', 'y': 1.02}
}

EJES_STYLE = {
    'showgrid': True,
    'gridwidth': 1,
    'gridcolor': '#d7dee3',
    'zeroline': True,
    'zerolinewidth': 2,
    'zerolinecolor': '#919597',
    'showline': True,
    'linecolor': 'black',
    'linewidth': 2,
    'mirror': True
}

LINEA_STYLE = {
    'width': 2
}

MARCADOR_STYLE = {
    'symbol': 'circle',
    'size': 5,
    'line': {'color': 'white', 'width': 1}
}

MAPA_CALOR_ESCALA = 'RdBu'
