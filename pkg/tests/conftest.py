"""Shared helpers and the acceptance-summary hook."""

GOLDEN_TABLE2 = (
    "q,m,N,mu,alpha,sigma,fl_mu\n"
    "3,1,6,1,16,2,1\n"
    "3,2,12,6,49,4,6\n"
    "3,3,24,22,133,8,22\n"
    "3,4,48,66,337,16,63\n"
    "5,1,10,6,40,3,6\n"
    "5,2,20,19,109,7,19\n"
    "5,3,40,55,277,15,55\n"
    "5,4,80,147,673,31,142\n"
    "15,1,30,24,181,13,27\n"
    "15,2,60,67,454,23,76\n"
    "15,3,120,183,1090,43,204\n"
    "15,4,240,475,2542,83,505\n"
)

acceptance_lines: list[str] = []


def corpus_lengths(limit: int, odd=(1, 3, 5, 15)) -> list[int]:
    """All N = q * 2^m <= limit over the given odd parts, ascending."""
    lengths = set()
    for q in odd:
        n = q
        while n <= limit:
            lengths.add(n)
            n *= 2
    return sorted(lengths)


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
