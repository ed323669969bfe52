#include <tee_internal_api.h>

#define TA_TABLE_UUID { 0x6c0d2e51, 0x7a8b, 0x4c19, { 0xbe, 0x37, 0x52, 0x0f, 0x9a, 0x6d, 0x14, 0xe2 } }

#define CMD_SET 0

static TEE_Result set_slot(uint32_t param_types, TEE_Param params[4])
{
	int array[16] = {0};

	(void)param_types;
	array[params[0].value.a - 8] = 43;
	params[0].value.b = array[0];
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_SET:
		return set_slot(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
