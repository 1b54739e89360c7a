"""Rich table rendering of report dicts."""

from rich import box
from rich.console import Console
from rich.table import Table


def _num(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_support(console: Console, payload: dict) -> None:
    """One table per event: outcomes in sorted order, active prefix marked."""
    for event in payload["events"]:
        table = Table(
            title=(
                f"{event['label']}  k={event['k']}  P={_num(event['P'])}  "
                f"Q={_num(event['Q'])}  threshold={_num(event['threshold'])}  "
                f"margin={_num(event['margin'])}"
            ),
            box=box.ROUNDED,
        )
        table.add_column("Outcome", style="cyan")
        table.add_column("p", justify="right")
        table.add_column("price", justify="right")
        table.add_column("edge ratio", justify="right", style="yellow")
        table.add_column("active", style="green")
        for row in event["outcomes"]:
            table.add_row(
                row["outcome"],
                _num(row["p"]),
                _num(row["price"]),
                _num(row["edge_ratio"]),
                _num(row["active"]),
            )
        console.print(table)


def render_solve(console: Console, payload: dict) -> None:
    """Portfolio table followed by the per-event identity table."""
    wagers = Table(
        title=f"cash={_num(payload['cash'])}  lambda={_num(payload['lambda'])}",
        box=box.ROUNDED,
    )
    wagers.add_column("Event", style="cyan")
    wagers.add_column("Outcome", style="cyan")
    wagers.add_column("g", justify="right", style="green")
    for row in payload["wagers"]:
        wagers.add_row(row["event"], row["outcome"], _num(row["g"]))
    console.print(wagers)

    events = Table(title="Per-event diagnostics", box=box.ROUNDED)
    for name in ("Event", "k", "P", "Q", "threshold", "K", "lambda/K", "identity residual"):
        events.add_column(name, justify="right" if name != "Event" else "left")
    for event in payload["events"]:
        events.add_row(
            event["label"],
            _num(event["k"]),
            _num(event["P"]),
            _num(event["Q"]),
            _num(event["threshold"]),
            _num(event["K"]),
            _num(event["lambda_over_K"]),
            _num(event["identity_residual"]),
        )
    console.print(events)

    boundary = payload["boundary"]
    console.print(
        f"regime={payload['regime']}  boundary={_num(boundary['active'])}  "
        f"nu={_num(boundary['nu'])}  objective={_num(payload['objective'])}  "
        f"iterations={payload['iterations']}  converged={_num(payload['converged'])}"
    )


def render_oracle(console: Console, payload: dict) -> None:
    table = Table(
        title=(
            f"oracle cash={_num(payload['cash'])}  objective={_num(payload['objective'])}  "
            f"lambda={_num(payload['lambda'])}"
        ),
        box=box.ROUNDED,
    )
    table.add_column("Event", style="cyan")
    table.add_column("Outcome", style="cyan")
    table.add_column("g", justify="right", style="green")
    for row in payload["wagers"]:
        table.add_row(row["event"], row["outcome"], _num(row["g"]))
    console.print(table)
    console.print(
        f"support_is_prefix={_num(payload['support_is_prefix'])}  "
        f"ambiguity_gap={_num(payload['ambiguity_gap'])}  pg_norm={_num(payload['pg_norm'])}"
    )


def render_comparison(console: Console, payload: dict) -> None:
    table = Table(title="Solver vs oracle", box=box.ROUNDED)
    table.add_column("Check", style="cyan")
    table.add_column("Value", justify="right")
    for key in ("passed", "support_equal", "max_wager_deviation", "objective_gap", "multiplier_gap"):
        table.add_row(key, _num(payload[key]))
    console.print(table)
