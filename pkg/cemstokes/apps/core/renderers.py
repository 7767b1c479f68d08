import math

import numpy as np
from rest_framework.renderers import JSONRenderer


def to_primitive(data):
    """ converts numpy values and non-finite floats into JSON-safe values """
    if isinstance(data, dict):
        return {str(key): to_primitive(value) for key, value in data.items()}

    if isinstance(data, (list, tuple)):
        return [to_primitive(value) for value in data]

    if isinstance(data, np.ndarray):
        return to_primitive(data.tolist())

    if isinstance(data, (np.integer,)):
        return int(data)

    if isinstance(data, (float, np.floating)):
        value = float(data)
        # strict JSON has no NaN/Infinity
        return value if math.isfinite(value) else None

    if isinstance(data, np.bool_):
        return bool(data)

    return data


class CemJSONRenderer(JSONRenderer):
    charset = 'utf-8'
    object_label = 'object'

    def render(self, data, media_type=None, renderer_context=None):
        data = to_primitive(data)

        # errors are rendered as they are so every failure has one shape
        errors = data.get('errors', None)

        if errors is not None:
            return super(CemJSONRenderer, self).render(
                data, media_type, renderer_context)

        return super(CemJSONRenderer, self).render({
            self.object_label: data
        }, media_type, renderer_context)


def write_json(path, data, object_label='object', indent=2):
    """ renders `data` under `object_label` and writes it to `path`

    Args:
        path: destination file
        data: dictionary of results (numpy values allowed)
        object_label: namespace the data is rendered under

    Returns: the rendered bytes
    """
    renderer = CemJSONRenderer()
    renderer.object_label = object_label
    content = renderer.render(data, renderer_context={'indent': indent})

    with open(path, 'wb') as handle:
        handle.write(content)
        handle.write(b'\n')

    return content
