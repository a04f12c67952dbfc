"""
Functions for visualizing features, principal components, baseline lines
and network embeddings.

Functions in this module are divided in two categories:

- Simple Plot Functions, with a signature similar to the following::

      plot_fxn(values, labels, parameters, savefig)

  where `values` holds the points to plot, `labels` the class of each
  point (0 intact, 1 broken), `parameters` are function-specific
  parameters, and `savefig` indicates whether to save the figure to an
  image file.

  Simple Plot Functions do not create a new figure or axis, so they can be
  called directly to plot in a previously created axis if desired. If
  `savefig` is not specified, the plot is maintained in the current axis
  when the function returns. However, if `savefig` is specified, the
  figure is closed after being saved.

  The following functions in this module are Simple Plot Functions:

    - ``hist1d``
    - ``scatter2d``
    - ``explained_variance``
    - ``training_curve``

- Complex Plot Functions, which create a figure with several axes, and use
  one or more Simple Plot functions to populate the axes. They always
  include a `savefig` argument.

  The following functions in this module are Complex Plot Functions:

    - ``feature_pairs``

"""

import itertools

import numpy as np
import matplotlib
import matplotlib.pyplot as plt

# Use default colors from palettable if available
try:
    import palettable
except ImportError as e:
    cmap_default = plt.get_cmap(matplotlib.rcParams['image.cmap'])
else:
    cmap_default = palettable.colorbrewer.diverging.Spectral_8_r.mpl_colormap

savefig_dpi = 250

CLASS_NAMES = ('intact', 'broken')

def _class_colors(color):
    if color is None:
        return [cmap_default(i) for i in np.linspace(0, 1, 2)]
    if not isinstance(color, list):
        return [color]*2
    return color

def _save(savefig):
    if savefig is not None:
        plt.tight_layout()
        plt.savefig(savefig, dpi=savefig_dpi)
        plt.close()

###
# SIMPLE PLOT FUNCTIONS
###

def hist1d(values,
           labels,
           bins=30,
           xlabel=None,
           title=None,
           color=None,
           savefig=None,
           **kwargs):
    """
    Plot one histogram per class of a single feature.

    Parameters
    ----------
    values : array_like
        N feature values.
    labels : array_like
        N labels in {0, 1}.
    bins : int or array_like, optional
        Histogram bins, shared by both classes.
    savefig : str, optional
        The name of the file to save the figure to. If None, do not save.

    Other parameters
    ----------------
    xlabel : str, optional
    title : str, optional
    color : matplotlib color or list of two colors, optional
        Colors of the intact and broken classes. If None, taken from the
        module-level variable `cmap_default`.
    kwargs : dict, optional
        Additional parameters passed directly to matplotlib's ``hist``.

    """
    values = np.asarray(values, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    color = _class_colors(color)
    bins = np.histogram_bin_edges(values, bins=bins)
    for label, name in enumerate(CLASS_NAMES):
        plt.hist(values[labels == label],
                 bins=bins,
                 alpha=0.6,
                 color=color[label],
                 label=name,
                 **kwargs)
    if xlabel is not None:
        plt.xlabel(xlabel)
    plt.ylabel('Segments')
    if title is not None:
        plt.title(title)
    plt.legend(loc='best')
    _save(savefig)

def scatter2d(values,
              labels,
              xlabel=None,
              ylabel=None,
              title=None,
              color=None,
              savefig=None,
              **kwargs):
    """
    Plot a 2D scatter plot of two columns, colored by class.

    Parameters
    ----------
    values : array_like
        Nx2 points, e.g. a pair of features, two principal components, a
        network embedding, or (intercept, incline) regression lines.
    labels : array_like
        N labels in {0, 1}.
    savefig : str, optional
        The name of the file to save the figure to. If None, do not save.

    Other parameters
    ----------------
    xlabel, ylabel : str, optional
    title : str, optional
    color : matplotlib color or list of two colors, optional
    kwargs : dict, optional
        Additional parameters passed directly to matplotlib's ``scatter``.

    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 2:
        raise ValueError('two columns need to be specified')
    labels = np.asarray(labels).ravel()
    color = _class_colors(color)
    for label, name in enumerate(CLASS_NAMES):
        points = values[labels == label]
        plt.scatter(points[:, 0],
                    points[:, 1],
                    s=5,
                    alpha=0.5,
                    color=color[label],
                    label=name,
                    **kwargs)
    if xlabel is not None:
        plt.xlabel(xlabel)
    if ylabel is not None:
        plt.ylabel(ylabel)
    if title is not None:
        plt.title(title)
    plt.legend(loc='best')
    _save(savefig)

def explained_variance(ratios, title=None, savefig=None):
    """
    Plot explained variance ratios as bars and their cumulative sum as a
    line.

    """
    ratios = np.asarray(ratios, dtype=np.float64)
    components = np.arange(1, ratios.size + 1)
    plt.bar(components, ratios, color=cmap_default(0.2), label='ratio')
    plt.plot(components, np.cumsum(ratios), 'o-', color=cmap_default(0.8),
             label='cumulative')
    plt.xticks(components)
    plt.xlabel('Component')
    plt.ylabel('Explained variance ratio')
    plt.ylim((0, 1.05))
    if title is not None:
        plt.title(title)
    plt.legend(loc='best')
    _save(savefig)

def training_curve(train_mse, test_mse=None, title=None, savefig=None):
    """
    Plot training and test MSE per epoch on a log scale.

    """
    epochs = np.arange(1, len(train_mse) + 1)
    plt.plot(epochs, train_mse, color=cmap_default(0.2), label='train')
    if test_mse is not None and len(test_mse) > 0:
        plt.plot(epochs, test_mse, color=cmap_default(0.8), label='test')
    plt.yscale('log')
    plt.xlabel('Epoch')
    plt.ylabel('MSE')
    if title is not None:
        plt.title(title)
    plt.legend(loc='best')
    _save(savefig)

###
# COMPLEX PLOT FUNCTIONS
###

def feature_pairs(values,
                  labels,
                  feature_names=None,
                  figsize=None,
                  savefig=None):
    """
    Plot every pair of features in a grid, with per-class histograms on
    the diagonal.

    Parameters
    ----------
    values : array_like
        NxD features.
    labels : array_like
        N labels in {0, 1}.
    feature_names : list of str, optional
        Axis labels. Default ``x1``..``xD``.
    figsize : tuple, optional
        Figure size. Default ``(2.5*D, 2.5*D)``.
    savefig : str, optional
        The name of the file to save the figure to. If None, do not save.

    """
    values = np.asarray(values, dtype=np.float64)
    d = values.shape[1]
    if feature_names is None:
        feature_names = ['x{}'.format(i + 1) for i in range(d)]
    if figsize is None:
        figsize = (2.5*d, 2.5*d)

    plt.figure(figsize=figsize)
    for i, j in itertools.product(range(d), repeat=2):
        plt.subplot(d, d, i*d + j + 1)
        if i == j:
            hist1d(values[:, i], labels)
        else:
            scatter2d(values[:, [j, i]], labels)
        plt.legend().remove()
        if i == d - 1:
            plt.xlabel(feature_names[j])
        if j == 0:
            plt.ylabel(feature_names[i])
    _save(savefig)
