from .svg_plotter import plot_bifurcation, plot_d_graph, plot_series
