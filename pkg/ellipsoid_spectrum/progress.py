# coding: utf8
"""This module reports the progression of long sweeps to an optional callback."""


class Progress:
    progress_func = None
    current_percentage = 0
    current_step_id = ""
    current_message = ""
    percent_range = 1
    len_tasks = 1
    current_task = 0

    @classmethod
    def set(
        cls,
        percentage: int = None,
        step_id: str = None,
        message: str = None,
        percent_range: int = None,
    ):
        """Set progression of the running command.
        percentage: is x as in x/100.
        step_id: step name which can be interpreted as an id
        message: is a free string message, defaults to the task counter
        percent_range: share of the 100 % given to the current step, used for tasks
        Without a percentage the call marks one more task as done."""
        if percentage is not None:
            cls.current_percentage = percentage
        else:
            cls.next_task()
            percentage = cls.current_percentage + cls.task_percentage()
        if step_id:
            cls.current_step_id = step_id
        else:
            step_id = cls.current_step_id
        if message is None:
            message = f"{cls.current_task}/{cls.len_tasks}"
        cls.current_message = message
        if percent_range:
            cls.percent_range = percent_range
        if cls.progress_func:
            cls.progress_func(percentage, step_id, message)

    @classmethod
    def next_task(cls):
        cls.current_task += 1
        return cls.current_task

    @classmethod
    def task_percentage(cls):
        return int(cls.current_task * cls.percent_range / max(cls.len_tasks, 1))

    @classmethod
    def new_task_count(cls, len_tasks: int = None):
        if len_tasks is not None:
            cls.len_tasks = len_tasks
        cls.current_task = 0
        return f"{cls.current_task}/{cls.len_tasks}"

    @classmethod
    def reset(cls):
        cls.current_percentage = 0
        cls.current_step_id = ""
        cls.current_message = ""
        cls.percent_range = 1
        cls.len_tasks = 1
        cls.current_task = 0
