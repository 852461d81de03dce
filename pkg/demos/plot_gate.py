"""
Sensor gate
===========

Step the gate through a short day: a few accepted windows send the sensors to
sleep, a timeout wakes them, the phone lies on a desk, then a stranger picks
it up.
"""

from behavior_auth import GateEvent, GateState, gate_step

events = ([GateEvent.WINDOW_ACCEPTED] * 5 + [GateEvent.TIMEOUT]
          + [GateEvent.WINDOW_STALE] * 3 + [GateEvent.TIMEOUT]
          + [GateEvent.WINDOW_ESCALATED, GateEvent.WINDOW_ESCALATED,
             GateEvent.WINDOW_ACCEPTED])

state = GateState()
print(f"{'event':<16} {'mode':<10} accepts stale")
print(f"{'(start)':<16} {state.mode.value:<10} {state.consecutive_accepts:>7} "
      f"{state.consecutive_stale_windows:>5}")
for event in events:
    state = gate_step(state, event)
    print(f"{event.value:<16} {state.mode.value:<10} {state.consecutive_accepts:>7} "
          f"{state.consecutive_stale_windows:>5}")
