"""Text rendering of pages and contexts."""

from typing import Iterable, Optional

from domain.types import DAY_NAMES, FACTORS, ContextVector, Item, SessionState

SUMMARY_CHARS = 120


def short_description(item: Item, limit: int = SUMMARY_CHARS) -> str:
    """Listing summary: description cut at a word boundary, or the title."""
    text = " ".join((item.description or "").split())
    if not text:
        return item.title
    if len(text) <= limit:
        return text
    cut = text[:limit].rsplit(" ", 1)[0] or text[:limit]
    return cut + "..."


def format_time(minute_of_day: int, day_of_week: int) -> str:
    return f"{DAY_NAMES[day_of_week % 7]} {minute_of_day // 60:02d}:{minute_of_day % 60:02d}"


def format_context(context: Optional[ContextVector], mask: Iterable[str] = FACTORS) -> str:
    """One-line rendering of the unmasked context factors; empty if none remain."""
    if context is None:
        return ""
    mask = set(mask)
    parts = []
    if "c_t" in mask:
        parts.append(format_time(context.c_t.minute_of_day, context.c_t.day_of_week))
    if "c_l" in mask:
        parts.append(f"at {context.c_l}")
    if "c_s" in mask:
        s = context.c_s
        parts.append(f"after {s.latest_activity}, feeling {s.mood} "
                     f"(need {s.need_level:.2f}, energy {s.energy_level:.2f})")
    if "c_g" in mask and context.c_g:
        parts.append(f"goal: {context.c_g}")
    if "c_b" in mask:
        b = context.c_b
        budget = f"budget {b.budget:.2f}" if b.budget is not None else "no budget limit"
        parts.append(f"{budget}, {b.time_available_minutes} min available")
    return "; ".join(parts)


def format_rating(state: SessionState, item: Item) -> str:
    own = state.own_ratings.get(item.item_id)
    if own is not None:
        return str(int(own))
    if item.stat_mean_rating is not None:
        return f"{item.stat_mean_rating:.1f}"
    return "N/A"


def format_price(item: Item) -> str:
    return "N/A" if item.price is None else f"{item.price:.2f}"


def _expanded_line(state: SessionState) -> Optional[str]:
    if state.expanded_item is None:
        return None
    item = state.find(state.expanded_item)
    if item is None:
        return None
    details = " ".join((item.description or item.title).split())
    return (f"EXPANDED: <- {item.title} -> <- Details: {details} -> "
            f"<- Categories: {', '.join(item.labels()) or 'N/A'} ->")


def render_page(state: SessionState, mask: Iterable[str] = FACTORS) -> str:
    """Render the page the agent sees, in the format of ``state.mode``."""
    lines = [f"PAGE {state.page_number}"]
    user_context = format_context(state.user_context, mask)
    expanded = _expanded_line(state)
    if state.mode == "webshop":
        if user_context:
            lines.append(f"USER CONTEXT: {user_context}")
        if state.page_context:
            lines.append(f"CONTEXT: {state.page_context}")
        lines.append("PRODUCTS:")
        for item in state.items:
            lines.append(f"<- {item.title} -> <- Price: {format_price(item)} -> "
                         f"<- Details: {short_description(item)} ->")
        if expanded:
            lines.append(expanded)
        lines.append("INTERACTIVE ELEMENTS (semantic IDs):")
        lines.append(", ".join(state.interactive_elements))
        return "\n".join(lines)

    if user_context:
        lines.append(f"CONTEXT: {user_context}")
    for item in state.items:
        lines.append(f"<- {item.title} -> <- History ratings: {format_rating(state, item)} -> "
                     f"<- Summary: {short_description(item)} ->")
    if expanded:
        lines.append(expanded)
    return "\n".join(lines)
