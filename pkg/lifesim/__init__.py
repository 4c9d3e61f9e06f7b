"""Life simulation: daily schedules, engagement moments and context vectors."""

from lifesim.context import build_context, minimal_context
from lifesim.engagement import Engagement, engagement_probability
from lifesim.schedule import DailySchedule, Externals, ScheduleSlot, generate_schedule
from lifesim.summary import BANDS, ContextSummary, band_of, summarize_contexts
