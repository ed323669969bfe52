#include <tee_internal_api.h>
#include <stdio.h>

#define TA_PIN_UUID { 0x3a5d0b7e, 0x61c2, 0x4e90, { 0xb4, 0x2d, 0x17, 0xe8, 0x09, 0x5f, 0xc3, 0x6a } }

#define CMD_SHOW_PIN 3

static TEE_Result show_pin(uint32_t param_types, TEE_Param params[4])
{
	char pin[8] = "4821";

	(void)param_types;
	snprintf(params[0].memref.buffer, params[0].memref.size, "pin=%s", pin);
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_SHOW_PIN:
		return show_pin(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
