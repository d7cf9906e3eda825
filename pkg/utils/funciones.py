import plotly.graph_objects as go

from styles import (
    COLORES,
    EJES_STYLE,
    LAYOUT_STYLE,
    LINEA_STYLE,
    MAPA_CALOR_ESCALA,
    MARCADOR_STYLE,
    TITULO_STYLE,
)


def aplicar_tema(fig, titulo, eje_x, eje_y, log_x=False, log_y=False):
    fig.update_layout(
        title=dict(text=f'<b>{titulo}</b>', **TITULO_STYLE),
        xaxis_title=f'<b>{eje_x}</b>',
        yaxis_title=f'<b>{eje_y}</b>',
        **LAYOUT_STYLE
    )

    fig.update_xaxes(type='log' if log_x else 'linear', **EJES_STYLE)
    fig.update_yaxes(type='log' if log_y else 'linear', **EJES_STYLE)

    return fig


def generar_grafico_lineas(df, x, columnas, titulo, eje_x, eje_y, log_x=False, log_y=False):
    """Una traza por columna del DataFrame contra la columna x."""
    fig = go.Figure()

    for i, columna in enumerate(columnas):
        color = COLORES[i % len(COLORES)]
        fig.add_trace(go.Scatter(
            x=df[x],
            y=df[columna],
            mode='lines+markers',
            line=dict(color=color, **LINEA_STYLE),
            marker=dict(color=color, **MARCADOR_STYLE),
            name=columna,
            hovertemplate=f'<b>{x}:</b> %{{x:.4g}}<br><b>{columna}:</b> %{{y:.6g}}<extra></extra>'
        ))

    return aplicar_tema(fig, titulo, eje_x, eje_y, log_x, log_y)


def generar_grafico_grupos(df, x, y, grupo, titulo, eje_x, eje_y, log_x=False, log_y=False):
    """Una traza por valor de la columna grupo (formato largo)."""
    fig = go.Figure()

    for i, (valor, datos) in enumerate(df.groupby(grupo, sort=True)):
        color = COLORES[i % len(COLORES)]
        fig.add_trace(go.Scatter(
            x=datos[x],
            y=datos[y],
            mode='lines+markers',
            line=dict(color=color, **LINEA_STYLE),
            marker=dict(color=color, **MARCADOR_STYLE),
            name=f'{grupo} = {valor}',
            hovertemplate=f'<b>{x}:</b> %{{x:.4g}}<br><b>{y}:</b> %{{y:.6g}}<extra></extra>'
        ))

    return aplicar_tema(fig, titulo, eje_x, eje_y, log_x, log_y)


def generar_mapa_calor(df, x, y, z, titulo, eje_x, eje_y):
    """Mapa de calor de z sobre la malla (x, y) de una tabla en formato largo."""
    tabla = df.pivot(index=y, columns=x, values=z)

    fig = go.Figure(data=[go.Heatmap(
        x=tabla.columns,
        y=tabla.index,
        z=tabla.values,
        colorscale=MAPA_CALOR_ESCALA,
        zmid=0,
        colorbar=dict(title=z),
        hovertemplate=f'<b>{x}:</b> %{{x:.3f}}<br><b>{y}:</b> %{{y:.3f}}<br><b>{z}:</b> %{{z:.3e}}<extra></extra>'
    )])

    fig = aplicar_tema(fig, titulo, eje_x, eje_y)
    fig.update_layout(showlegend=False)

    return fig
