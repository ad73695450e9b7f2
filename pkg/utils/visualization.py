"""
Plotly figures for VGDL Forge: level grids, solution paths and trial reports
"""

import plotly.graph_objects as go
import plotly.express as px
from plotly.subplots import make_subplots
import numpy as np
import pandas as pd

from trial_harness import CODE_COLUMNS, OUTCOME_COLUMNS
from vgdl_validator import ErrorCode

OUTCOME_COLORS = {'G': '#2ca02c', 'R': '#1f77b4', 'L': '#ff7f0e', 'W': '#d62728'}
VERDICT_COLUMNS = ['parsable', 'logical', 'mappable', 'correct']


def level_matrix(level, spec=None):
    """
    Numeric codes and labels for each level cell

    Args:
        level (LevelGrid): Level to draw
        spec (GameSpec): Game whose LevelMapping labels the cells; optional

    Returns:
        tuple: (codes array of shape (height, width), labels array, legend list)
    """
    mapping = spec.mapped_chars() if spec is not None else {}
    legend = sorted(level.chars())
    codes = np.zeros((level.height, level.width), dtype=int)
    labels = np.empty((level.height, level.width), dtype=object)

    for x, y, ch in level.cells():
        codes[y, x] = legend.index(ch)
        stypes = mapping.get(ch)
        labels[y, x] = f"'{ch}' {' '.join(stypes)}" if stypes else f"'{ch}'"

    return codes, labels, legend


def create_level_figure(level, spec=None, path=None, title='Level'):
    """
    Draw a level as a categorical heatmap, optionally with the avatar's path

    Args:
        level (LevelGrid): Level to draw
        spec (GameSpec): Game used for hover labels
        path (list): Avatar cells (x, y) in visiting order
        title (str): Figure title

    Returns:
        plotly.graph_objects.Figure: Level figure
    """
    codes, labels, legend = level_matrix(level, spec)
    colors = px.colors.qualitative.Pastel
    steps = max(len(legend) - 1, 1)
    colorscale = []
    for i, _ in enumerate(legend):
        color = colors[i % len(colors)]
        colorscale.append([i / steps, color])
    if len(legend) == 1:
        colorscale.append([1.0, colorscale[0][1]])

    fig = go.Figure(data=go.Heatmap(
        z=codes,
        text=labels,
        hovertemplate='x=%{x} y=%{y}<br>%{text}<extra></extra>',
        colorscale=colorscale,
        showscale=False,
        xgap=1,
        ygap=1
    ))

    for x, y, ch in level.cells():
        if ch.strip():
            fig.add_annotation(x=x, y=y, text=ch, showarrow=False, font=dict(size=14))

    if path:
        xs = [cell[0] for cell in path]
        ys = [cell[1] for cell in path]
        fig.add_trace(go.Scatter(
            x=xs,
            y=ys,
            mode='lines+markers',
            name='Avatar path',
            line=dict(color='black', width=3),
            marker=dict(size=6)
        ))

    fig.update_layout(
        title=title,
        xaxis=dict(showgrid=False, zeroline=False, dtick=1),
        yaxis=dict(showgrid=False, zeroline=False, dtick=1, autorange='reversed', scaleanchor='x'),
        height=max(300, 40 * level.height + 120),
        showlegend=bool(path)
    )

    return fig


def avatar_path(engine, level, actions):
    """Avatar cells visited while playing actions, starting cell included"""
    state = engine.init_state(level)
    path = [state.avatar_pos]
    for action in actions:
        if state.status.value != 'Running':
            break
        state = engine.step(state, action)
        if state.avatar_pos is not None:
            path.append(state.avatar_pos)
    return path


def create_verdict_chart(table):
    """
    Grouped bars of parsable, logical, mappable and correct counts per preset

    Args:
        table (ReportTable): Aggregated trial counts

    Returns:
        plotly.graph_objects.Figure: One subplot per provider
    """
    frame = table.frame.reset_index()
    providers = list(dict.fromkeys(frame['provider']))
    fig = make_subplots(rows=1, cols=max(len(providers), 1), subplot_titles=providers or ['No trials'],
                        shared_yaxes=True)

    colors = px.colors.qualitative.Set1
    for col, provider in enumerate(providers, start=1):
        rows = frame[frame['provider'] == provider]
        for i, verdict in enumerate(VERDICT_COLUMNS):
            fig.add_trace(go.Bar(
                x=rows['preset'],
                y=rows[verdict],
                name=verdict.title(),
                marker_color=colors[i % len(colors)],
                showlegend=col == 1
            ), row=1, col=col)

    fig.update_layout(
        title='Verdicts per Preset',
        barmode='group',
        yaxis_title='Trials',
        height=450
    )

    return fig


def create_outcome_chart(table):
    """
    Stacked G/R/L/W bars per (provider, preset)

    Args:
        table (ReportTable): Aggregated trial counts

    Returns:
        plotly.graph_objects.Figure: Outcome chart
    """
    frame = table.frame.reset_index()
    labels = frame['provider'] + ' ' + frame['preset']

    fig = go.Figure()
    for outcome in OUTCOME_COLUMNS:
        fig.add_trace(go.Bar(
            x=labels,
            y=frame[outcome],
            name=outcome,
            marker_color=OUTCOME_COLORS[outcome]
        ))

    fig.update_layout(
        title='Outcome Classes (G: both correct, R: rules only, L: level only, W: neither)',
        barmode='stack',
        xaxis_title='Provider / Preset',
        yaxis_title='Trials',
        height=500
    )

    return fig


def error_frame(table):
    """Error-code counts indexed by 'provider preset', columns labelled for display"""
    frame = table.frame.reset_index()
    index = frame['provider'] + ' ' + frame['preset']
    counts = frame[CODE_COLUMNS].set_index(index)
    counts.columns = [ErrorCode(code).label for code in CODE_COLUMNS]
    return counts


def create_error_heatmap(table):
    """
    Heatmap of error-code counts

    Args:
        table (ReportTable): Aggregated trial counts

    Returns:
        plotly.graph_objects.Figure: Heatmap with one row per (provider, preset)
    """
    counts = error_frame(table)

    fig = go.Figure(data=go.Heatmap(
        x=list(counts.columns),
        y=list(counts.index),
        z=counts.values,
        text=counts.values,
        texttemplate='%{text}',
        colorscale='Reds',
        hoverongaps=False
    ))

    fig.update_layout(
        title='Errors in Generated Rules and Levels',
        xaxis_title='Error',
        yaxis=dict(title='Provider / Preset', autorange='reversed'),
        height=max(400, 28 * len(counts) + 150)
    )

    return fig


def outcome_shares(table):
    """Share of each outcome class per provider across all presets"""
    frame = table.frame.reset_index()
    totals = frame.groupby('provider')[OUTCOME_COLUMNS].sum()
    trials = totals.sum(axis=1).replace(0, np.nan)
    return totals.div(trials, axis=0).fillna(0.0)


def create_provider_share_chart(table):
    """Horizontal stacked outcome shares per provider"""
    shares = outcome_shares(table)
    long = shares.reset_index().melt(id_vars='provider', var_name='outcome', value_name='share')
    fig = px.bar(
        long,
        x='share',
        y='provider',
        color='outcome',
        orientation='h',
        color_discrete_map=OUTCOME_COLORS,
        title='Outcome Share per Provider'
    )
    fig.update_layout(xaxis=dict(tickformat='.0%'), height=350)
    return fig


def records_frame(records):
    """One row per trial record for tabular display"""
    rows = []
    for record in records:
        rows.append({
            'provider': record.provider,
            'preset': record.preset,
            'trial': record.trial_index,
            'outcome': record.outcome if not record.errored else 'Errored',
            'errors': ', '.join(record.codes),
            'solvable': record.solvable,
            'steps': record.solve_steps,
        })
    return pd.DataFrame(rows, columns=['provider', 'preset', 'trial', 'outcome', 'errors', 'solvable', 'steps'])
