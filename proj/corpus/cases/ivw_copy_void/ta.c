#include <tee_internal_api.h>

#define TA_CTX_UUID { 0x2f6b8e90, 0x1d3c, 0x47a5, { 0x9c, 0x0e, 0x6b, 0x21, 0xf4, 0x58, 0xa7, 0x33 } }

#define CMD_LOAD 0
#define CTX_SIZE 256

static void *buffer;
static uint32_t ctx_len;

TEE_Result TA_OpenSessionEntryPoint(uint32_t param_types, TEE_Param params[4], void **sess_ctx)
{
	(void)param_types;
	(void)params;
	(void)sess_ctx;
	ctx_len = CTX_SIZE;
	buffer = TEE_Malloc(ctx_len, TEE_MALLOC_FILL_ZERO);
	if (!buffer)
		return TEE_ERROR_OUT_OF_MEMORY;
	return TEE_SUCCESS;
}

static TEE_Result load(uint32_t param_types, TEE_Param params[4])
{
	(void)param_types;
	TEE_MemMove(buffer, params[0].memref.buffer, params[0].memref.size);
	return TEE_SUCCESS;
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_LOAD:
		return load(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
