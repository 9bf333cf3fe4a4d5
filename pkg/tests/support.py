from chernlab.complexes import build_rips
from chernlab.groups import GeneratingSet, default_generators, parse_group_spec, word_metric


def metric_for(spec, gens=None):
    group = parse_group_spec(spec)
    gs = GeneratingSet.create(group, default_generators(group, spec) if gens is None else gens)
    return word_metric(gs)


def rips_for(spec, d, max_dim=4, gens=None):
    m = metric_for(spec, gens)
    return build_rips(m.group, m, d, max_dim)

