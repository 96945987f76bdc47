"""Tiny text renderer shared by the demo scripts."""


def draw(state):
    """One character per node: robot count if occupied, '.' if visited, '_' if never visited."""
    occ = state.config.occupancy
    cells = []
    for node, m in enumerate(occ):
        if m:
            cells.append(str(m))
        else:
            cells.append("." if node in state.visited else "_")
    return "".join(cells)
